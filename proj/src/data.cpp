#include "gpsel/data.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "gpsel/errors.hpp"
#include "gpsel/model.hpp"
#include "gpsel/numerics.hpp"
#include "gpsel/rng.hpp"

namespace gpsel {

Dataset linear_benchmark_dataset() {
  Dataset d;
  d.x.resize(10);
  for (int i = 0; i < 10; ++i) d.x[i] = i / 9.0;
  d.y = {0.106470838606225,  0.151844221539413, 0.296365731603068,
         0.406171032190665,  0.0893660808707719, 0.496633373724801,
         1.3649612419355,    0.576025393790963, 1.03487772075105,
         1.08454376768281};
  return d;
}

Dataset sample_from_gp_prior(const GeneratorSpec& spec) {
  if (spec.n < 2) throw ConfigError("generator needs n >= 2");
  if (!(spec.x_hi > spec.x_lo)) throw ConfigError("degenerate input range");
  Dataset d;
  d.x.resize(spec.n);
  for (int i = 0; i < spec.n; ++i) {
    d.x[i] = spec.x_lo + (spec.x_hi - spec.x_lo) * i / (spec.n - 1);
  }

  const Layout layout = param_layout(spec.expr);
  const std::vector<double> raw(layout.u(), 0.0);  // standard init
  Eigen::MatrixXd K;
  gram_matrix(spec.expr, raw.data(), d.x, K);
  const double noise_var = softplus(0.0);
  K.diagonal().array() += noise_var;
  K.diagonal().array() += 1e-8 * K.diagonal().mean();

  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("GP-prior sampling: covariance not PSD");
  }
  Rng rng(spec.seed);
  Eigen::VectorXd z(spec.n);
  for (int i = 0; i < spec.n; ++i) z[i] = rng.normal();
  Eigen::VectorXd y = llt.matrixL() * z;
  d.y.assign(y.data(), y.data() + spec.n);
  return d;
}

Dataset normalize(const Dataset& d, NormalizeRecord* record) {
  if (d.n() < 2) throw ConfigError("normalize needs n >= 2");
  const double mean = std::accumulate(d.y.begin(), d.y.end(), 0.0) / d.n();
  double var = 0.0;
  for (double v : d.y) var += (v - mean) * (v - mean);
  var /= d.n();  // population variance
  if (var <= 0.0) throw ConfigError("normalize: zero variance targets");
  const double stdev = std::sqrt(var);
  Dataset out;
  out.x = d.x;
  out.y.resize(d.y.size());
  for (std::size_t i = 0; i < d.y.size(); ++i) out.y[i] = (d.y[i] - mean) / stdev;
  if (record) *record = {mean, stdev, true};
  return out;
}

Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open data file: " + path);
  Dataset d;
  std::string line;
  std::size_t lineno = 0;
  bool header_allowed = true;
  while (std::getline(in, line)) {
    ++lineno;
    // trim CR and surrounding whitespace
    while (!line.empty() && (line.back() == '\r' || std::isspace(static_cast<unsigned char>(line.back())))) line.pop_back();
    std::size_t start = 0;
    while (start < line.size() && std::isspace(static_cast<unsigned char>(line[start]))) ++start;
    if (start == line.size()) continue;  // blank line
    std::string body = line.substr(start);
    for (char& c : body) {
      if (c == ',' || c == '\t' || c == ';') c = ' ';
    }
    std::istringstream ss(body);
    double xv, yv;
    std::string extra;
    if (!(ss >> xv >> yv)) {
      if (header_allowed) {  // tolerate one non-numeric header row
        header_allowed = false;
        continue;
      }
      throw DataError("malformed row: '" + line + "'", lineno);
    }
    if (ss >> extra) throw DataError("too many columns", lineno);
    header_allowed = false;
    d.x.push_back(xv);
    d.y.push_back(yv);
  }
  if (d.n() == 0) throw DataError("no data rows", lineno == 0 ? 1 : lineno);

  std::vector<int> order(d.n());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return d.x[a] < d.x[b]; });
  Dataset sorted;
  sorted.x.reserve(d.n());
  sorted.y.reserve(d.n());
  for (int i : order) {
    sorted.x.push_back(d.x[i]);
    sorted.y.push_back(d.y[i]);
  }
  return sorted;
}

void write_csv(const Dataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write data file: " + path);
  out << "x,y\n";
  char buf[64];
  for (int i = 0; i < d.n(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", d.x[i], d.y[i]);
    out << buf;
  }
}

}  // namespace gpsel
