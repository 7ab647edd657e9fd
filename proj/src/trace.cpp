#include "neucept/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace neucept {

namespace fs = std::filesystem;
using nlohmann::json;

int ActivationTrace::layer_index(const std::string& id) const {
  for (std::size_t i = 0; i < layers.size(); ++i)
    if (layers[i].layer_id == id) return static_cast<int>(i);
  return -1;
}

const LayerMatrix& ActivationTrace::layer(const std::string& id) const {
  int i = layer_index(id);
  if (i < 0) throw DataError("unknown layer id: " + id);
  return layers[static_cast<std::size_t>(i)];
}

void ActivationTrace::validate() const {
  if (layers.empty()) throw DataError("trace has no layers");
  Eigen::Index n = layers.front().data.rows();
  if (n < 1) throw DataError("empty layer: " + layers.front().layer_id);
  for (const auto& lm : layers) {
    if (lm.data.rows() != n)
      throw DataError("row count mismatch at layer " + lm.layer_id);
    if (lm.data.cols() < 1 || lm.data.rows() < 1)
      throw DataError("empty layer: " + lm.layer_id);
    if (!lm.data.allFinite())
      throw DataError("non-finite activation in layer " + lm.layer_id);
  }
  if (response.size() != n) throw DataError("response length mismatch");
  if (!response.allFinite()) throw DataError("non-finite response");
  if (!prior_labels.empty() && static_cast<Eigen::Index>(prior_labels.size()) != n)
    throw DataError("prior label length mismatch");
  if (!posterior_labels.empty() &&
      static_cast<Eigen::Index>(posterior_labels.size()) != n)
    throw DataError("posterior label length mismatch");
  if (static_cast<Eigen::Index>(class_mask.size()) != n)
    throw DataError("class mask length mismatch");
}

namespace {

std::vector<float> read_f32_file(const fs::path& file, std::size_t expected) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DataError("missing file: " + file.string());
  in.seekg(0, std::ios::end);
  auto bytes = static_cast<std::size_t>(in.tellg());
  if (bytes != expected * sizeof(float))
    throw DataError("size disagreement: " + file.string() + " holds " +
                    std::to_string(bytes / sizeof(float)) + " values, manifest declares " +
                    std::to_string(expected));
  in.seekg(0);
  std::vector<float> buf(expected);
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(bytes));
  if (!in) throw DataError("short read: " + file.string());
  return buf;
}

void write_f32_file(const fs::path& file, const Eigen::MatrixXd& m) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw DataError("unwritable path: " + file.string());
  std::vector<float> buf(static_cast<std::size_t>(m.rows() * m.cols()));
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      buf[k++] = static_cast<float>(m(i, j));
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!out) throw DataError("write failed: " + file.string());
}

std::vector<int> read_int_lines(const fs::path& file, Eigen::Index expected) {
  std::ifstream in(file);
  if (!in) throw DataError("missing file: " + file.string());
  std::vector<int> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::size_t pos = 0;
    int v = std::stoi(line, &pos);
    out.push_back(v);
  }
  if (static_cast<Eigen::Index>(out.size()) != expected)
    throw DataError("label file " + file.string() + " has " +
                    std::to_string(out.size()) + " entries, expected " +
                    std::to_string(expected));
  return out;
}

void write_int_lines(const fs::path& file, const std::vector<int>& v) {
  std::ofstream out(file);
  if (!out) throw DataError("unwritable path: " + file.string());
  for (int x : v) out << x << "\n";
}

}  // namespace

ActivationTrace load_trace(const fs::path& dir) {
  fs::path mf = dir / "manifest.json";
  std::ifstream in(mf);
  if (!in) throw DataError("missing file: " + mf.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("bad manifest " + mf.string() + ": " + e.what());
  }

  ActivationTrace t;
  auto n = j.at("sample_count").get<Eigen::Index>();
  for (const auto& jl : j.at("layers")) {
    LayerMatrix lm;
    lm.layer_id = jl.at("layer_id").get<std::string>();
    auto cols = jl.at("neuron_count").get<Eigen::Index>();
    auto buf = read_f32_file(dir / jl.at("file").get<std::string>(),
                             static_cast<std::size_t>(n * cols));
    lm.data.resize(n, cols);
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index c = 0; c < cols; ++c) lm.data(i, c) = buf[k++];
    t.layers.push_back(std::move(lm));
  }
  {
    auto buf = read_f32_file(dir / j.at("response_file").get<std::string>(),
                             static_cast<std::size_t>(n));
    t.response.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) t.response[i] = buf[static_cast<std::size_t>(i)];
  }
  if (j.contains("prior_labels_file"))
    t.prior_labels = read_int_lines(dir / j["prior_labels_file"].get<std::string>(), n);
  if (j.contains("posterior_labels_file"))
    t.posterior_labels =
        read_int_lines(dir / j["posterior_labels_file"].get<std::string>(), n);
  if (j.contains("class_mask_file")) {
    auto v = read_int_lines(dir / j["class_mask_file"].get<std::string>(), n);
    t.class_mask.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) t.class_mask[i] = v[i] != 0;
  } else {
    t.class_mask.assign(static_cast<std::size_t>(n), true);
  }
  t.validate();
  return t;
}

void save_trace(const ActivationTrace& trace, const fs::path& dir) {
  trace.validate();
  std::error_code ec;
  fs::create_directories(dir, ec);

  json j;
  j["sample_count"] = trace.sample_count();
  j["layers"] = json::array();
  for (const auto& lm : trace.layers) {
    std::string file = lm.layer_id + ".bin";
    j["layers"].push_back({{"layer_id", lm.layer_id},
                           {"neuron_count", lm.data.cols()},
                           {"file", file}});
    write_f32_file(dir / file, lm.data);
  }
  j["response_file"] = "response.bin";
  write_f32_file(dir / "response.bin", trace.response);
  if (!trace.prior_labels.empty()) {
    j["prior_labels_file"] = "prior_labels.txt";
    write_int_lines(dir / "prior_labels.txt", trace.prior_labels);
  }
  if (!trace.posterior_labels.empty()) {
    j["posterior_labels_file"] = "posterior_labels.txt";
    write_int_lines(dir / "posterior_labels.txt", trace.posterior_labels);
  }
  {
    j["class_mask_file"] = "class_mask.txt";
    std::vector<int> m(trace.class_mask.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = trace.class_mask[i] ? 1 : 0;
    write_int_lines(dir / "class_mask.txt", m);
  }
  std::ofstream out(dir / "manifest.json");
  if (!out) throw DataError("unwritable path: " + (dir / "manifest.json").string());
  out << j.dump(2) << "\n";
}

namespace {

Eigen::MatrixXd parse_csv(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("missing file: " + file.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty CSV: " + file.string());
  // header row defines the column count
  std::size_t cols = static_cast<std::size_t>(
      std::count(line.begin(), line.end(), ',')) + 1;
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t pos = 0;
        double v = std::stod(cell, &pos);
        values.push_back(v);
      } catch (const std::exception&) {
        throw DataError("non-numeric cell '" + cell + "' in " + file.string());
      }
      ++c;
    }
    if (c != cols)
      throw DataError("ragged row in " + file.string() + ": row " +
                      std::to_string(rows + 2) + " has " + std::to_string(c) +
                      " cells, header has " + std::to_string(cols));
    ++rows;
  }
  Eigen::MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = values[k++];
  return m;
}

}  // namespace

ActivationTrace import_csv(const std::vector<fs::path>& layer_files,
                           const std::optional<fs::path>& label_file) {
  if (layer_files.empty()) throw DataError("no layer files");
  ActivationTrace t;
  for (std::size_t i = 0; i < layer_files.size(); ++i) {
    LayerMatrix lm;
    lm.layer_id = "L" + std::to_string(i);
    lm.data = parse_csv(layer_files[i]);
    t.layers.push_back(std::move(lm));
  }
  Eigen::Index n = t.sample_count();
  // response convention: first column of the last (output) layer
  t.response = t.layers.back().data.col(0);
  t.class_mask.assign(static_cast<std::size_t>(n), true);
  if (label_file) t.prior_labels = read_int_lines(*label_file, n);
  t.validate();
  return t;
}

StandardizedView standardize(const LayerMatrix& m, const std::vector<bool>& class_mask) {
  if (static_cast<Eigen::Index>(class_mask.size()) != m.data.rows())
    throw DataError("class mask length mismatch");
  Eigen::MatrixXd rows = masked_rows(m.data, class_mask);
  if (rows.rows() < 2) throw DataError("fewer than 2 masked samples");

  Eigen::Index n = rows.rows(), p = rows.cols();
  StandardizedView v;
  std::vector<double> means, stds;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index jcol = 0; jcol < p; ++jcol) {
    double mean = rows.col(jcol).mean();
    double ss = (rows.col(jcol).array() - mean).square().sum();
    double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (sd < 1e-12) {
      v.dropped.push_back(static_cast<int>(jcol));
    } else {
      keep.push_back(jcol);
      means.push_back(mean);
      stds.push_back(sd);
    }
  }
  v.data.resize(n, static_cast<Eigen::Index>(keep.size()));
  v.means.resize(static_cast<Eigen::Index>(keep.size()));
  v.stds.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    auto j = static_cast<Eigen::Index>(k);
    v.data.col(j) = (rows.col(keep[k]).array() - means[k]) / stds[k];
    v.means[j] = means[k];
    v.stds[j] = stds[k];
    v.retained.push_back(static_cast<int>(keep[k]));
  }
  return v;
}

Eigen::VectorXd masked_vector(const Eigen::VectorXd& v, const std::vector<bool>& mask) {
  Eigen::Index n = 0;
  for (bool b : mask) n += b ? 1 : 0;
  Eigen::VectorXd out(n);
  Eigen::Index k = 0;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) out[k++] = v[static_cast<Eigen::Index>(i)];
  return out;
}

Eigen::MatrixXd masked_rows(const Eigen::MatrixXd& m, const std::vector<bool>& mask) {
  Eigen::Index n = 0;
  for (bool b : mask) n += b ? 1 : 0;
  Eigen::MatrixXd out(n, m.cols());
  Eigen::Index k = 0;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) out.row(k++) = m.row(static_cast<Eigen::Index>(i));
  return out;
}

std::vector<int> masked_labels(const std::vector<int>& v, const std::vector<bool>& mask) {
  std::vector<int> out;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) out.push_back(v[i]);
  return out;
}

}  // namespace neucept
