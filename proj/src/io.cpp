#include "neucept/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "neucept/errors.hpp"

namespace neucept {

namespace fs = std::filesystem;
using nlohmann::json;

void atomic_write(const fs::path& file, const std::string& content) {
  fs::path tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw DataError("unwritable path: " + tmp.string());
    out << content;
    if (!out) throw DataError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, file, ec);
  if (ec) throw DataError("rename failed: " + file.string() + ": " + ec.message());
}

std::string read_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DataError("missing file: " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json selection_to_json(const std::vector<SelectionResult>& results) {
  json j;
  j["results"] = json::array();
  for (const auto& r : results) {
    json jr;
    jr["layer_id"] = r.layer_id;
    jr["q"] = r.q;
    jr["tau"] = json::array();
    for (double t : r.tau_per_rep)
      jr["tau"].push_back(std::isfinite(t) ? json(t) : json("inf"));
    jr["frequency"] = std::vector<double>(r.frequency.data(),
                                          r.frequency.data() + r.frequency.size());
    jr["selected"] = r.selected;
    j["results"].push_back(std::move(jr));
  }
  return j;
}

std::vector<SelectionResult> selection_from_json(const json& j) {
  std::vector<SelectionResult> out;
  for (const auto& jr : j.at("results")) {
    SelectionResult r;
    r.layer_id = jr.at("layer_id").get<std::string>();
    r.q = jr.at("q").get<double>();
    for (const auto& t : jr.at("tau"))
      r.tau_per_rep.push_back(
          t.is_string() ? std::numeric_limits<double>::infinity() : t.get<double>());
    auto freq = jr.at("frequency").get<std::vector<double>>();
    r.frequency = Eigen::Map<Eigen::VectorXd>(freq.data(),
                                              static_cast<Eigen::Index>(freq.size()));
    r.selected = jr.at("selected").get<std::vector<int>>();
    out.push_back(std::move(r));
  }
  return out;
}

json mechanism_to_json(const MechanismAssignment& m) {
  json j;
  j["k"] = m.k;
  j["method"] = to_string(m.method);
  j["fit_score"] = m.fit_score;
  j["labels"] = m.c;
  std::vector<int> sizes(static_cast<std::size_t>(m.k), 0);
  for (int c : m.c) ++sizes[static_cast<std::size_t>(c)];
  j["cluster_sizes"] = sizes;
  return j;
}

MechanismAssignment mechanism_from_json(const json& j) {
  MechanismAssignment m;
  m.k = j.at("k").get<int>();
  m.method = cluster_method_from_string(j.at("method").get<std::string>());
  m.fit_score = j.at("fit_score").get<double>();
  m.c = j.at("labels").get<std::vector<int>>();
  return m;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace neucept
