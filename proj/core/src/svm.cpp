#include "chromatex/svm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "chromatex/binary_io.hpp"
#include "chromatex/error.hpp"
#include "json.hpp"

namespace chromatex {

std::string_view kernel_name(KernelKind kind) noexcept {
  return kind == KernelKind::Linear ? "linear" : "rbf";
}

KernelKind parse_kernel(std::string_view name) {
  if (name == "linear") return KernelKind::Linear;
  if (name == "rbf") return KernelKind::RBF;
  fail(ErrorCode::InvalidArgument, "unknown kernel '" + std::string(name) + "'");
}

void KernelSpec::validate() const {
  if (kind == KernelKind::RBF && !(gamma > 0.0 && std::isfinite(gamma))) {
    fail(ErrorCode::InvalidArgument, "RBF kernel needs gamma > 0");
  }
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

double KernelSpec::operator()(std::span<const double> a, std::span<const double> b) const {
  return kind == KernelKind::Linear ? dot(a, b) : std::exp(-gamma * squared_distance(a, b));
}

void TrainConfig::validate() const {
  if (c_grid.empty() || gamma_grid.empty()) {
    fail(ErrorCode::InvalidArgument, "C and gamma grids must be non-empty");
  }
  for (double c : c_grid) {
    if (!(c > 0.0)) fail(ErrorCode::InvalidArgument, "C grid values must be positive");
  }
  for (double g : gamma_grid) {
    if (!(g > 0.0)) fail(ErrorCode::InvalidArgument, "gamma grid values must be positive");
  }
  if (!(tolerance > 0.0)) fail(ErrorCode::InvalidArgument, "tolerance must be positive");
}

std::optional<std::vector<double>> Model::weight_vector() const {
  if (kernel.kind != KernelKind::Linear) return std::nullopt;
  std::vector<double> w(dim, 0.0);
  for (const auto& sv : support) {
    for (std::size_t i = 0; i < dim; ++i) w[i] += sv.alpha * sv.label * sv.x[i];
  }
  return w;
}

KernelMatrix KernelMatrix::subset(std::span<const std::size_t> idx) const {
  KernelMatrix out;
  out.n = idx.size();
  out.values.resize(out.n * out.n);
  for (std::size_t a = 0; a < out.n; ++a) {
    const double* row = values.data() + idx[a] * n;
    double* dst = out.values.data() + a * out.n;
    for (std::size_t b = 0; b < out.n; ++b) dst[b] = row[idx[b]];
  }
  return out;
}

std::vector<double> pairwise_base(std::span<const std::span<const double>> xs, KernelKind kind) {
  const std::size_t n = xs.size();
  std::vector<double> base(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v =
          kind == KernelKind::Linear ? dot(xs[i], xs[j]) : squared_distance(xs[i], xs[j]);
      base[i * n + j] = v;
      base[j * n + i] = v;
    }
  }
  return base;
}

KernelMatrix kernel_from_base(const std::vector<double>& base, std::size_t n,
                              const KernelSpec& kernel) {
  KernelMatrix k{n, base};
  if (kernel.kind == KernelKind::RBF) {
    for (double& v : k.values) v = std::exp(-kernel.gamma * v);
  }
  return k;
}

DualSolution solve_dual(const KernelMatrix& k, std::span<const int> labels, double C,
                        double tolerance, std::size_t max_iterations) {
  const std::size_t n = labels.size();
  if (k.n != n) fail(ErrorCode::DimMismatch, "kernel matrix and label count differ");
  if (!(C > 0.0)) fail(ErrorCode::InvalidArgument, "C must be positive");
  constexpr double kTau = 1e-12;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  DualSolution sol;
  sol.alpha.assign(n, 0.0);
  std::vector<double> grad(n, -1.0);  // gradient of the dual objective
  std::vector<double>& alpha = sol.alpha;
  const auto y = [&](std::size_t t) { return static_cast<double>(labels[t]); };
  const auto in_up = [&](std::size_t t) {
    return (labels[t] > 0 && alpha[t] < C) || (labels[t] < 0 && alpha[t] > 0.0);
  };
  const auto in_low = [&](std::size_t t) {
    return (labels[t] > 0 && alpha[t] > 0.0) || (labels[t] < 0 && alpha[t] < C);
  };

  for (;;) {
    // First index: maximal violator in I_up.
    double g_max = -kInf;
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (in_up(t) && -y(t) * grad[t] >= g_max) {
        g_max = -y(t) * grad[t];
        i = t;
      }
    }
    // Second index: best second-order gain in I_low.
    double g_min = kInf;
    double best_obj = kInf;
    std::size_t j = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      const double v = -y(t) * grad[t];
      g_min = std::min(g_min, v);
      if (i == n) continue;
      const double b = g_max - v;
      if (b > 0.0) {
        double a = k(i, i) + k(t, t) - 2.0 * k(i, t);
        if (a <= 0.0) a = kTau;
        const double obj = -(b * b) / a;
        if (obj <= best_obj) {
          best_obj = obj;
          j = t;
        }
      }
    }
    sol.kkt_gap = (i == n || g_min == kInf) ? 0.0 : g_max - g_min;
    if (i == n || j == n || sol.kkt_gap < tolerance) break;
    if (sol.iterations >= max_iterations) {
      sol.converged = false;
      break;
    }
    ++sol.iterations;

    const double yi = y(i), yj = y(j);
    double a = k(i, i) + k(j, j) - 2.0 * k(i, j);
    if (a <= 0.0) a = kTau;
    const double old_ai = alpha[i], old_aj = alpha[j];

    if (yi != yj) {
      const double delta = (-grad[i] - grad[j]) / a;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = C - diff;
        }
      } else if (alpha[j] > C) {
        alpha[j] = C;
        alpha[i] = C + diff;
      }
    } else {
      const double delta = (grad[i] - grad[j]) / a;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = sum - C;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > C) {
        if (alpha[j] > C) {
          alpha[j] = C;
          alpha[i] = sum - C;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }

    const double dai = alpha[i] - old_ai;
    const double daj = alpha[j] - old_aj;
    for (std::size_t t = 0; t < n; ++t) {
      // Q_ti = y_t y_i K_ti
      grad[t] += y(t) * (yi * k(t, i) * dai + yj * k(t, j) * daj);
    }
  }

  // Bias from free vectors, or the midpoint of the feasible interval.
  double ub = kInf, lb = -kInf, sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y(t) * grad[t];
    if (alpha[t] >= C) {
      if (labels[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0.0) {
      if (labels[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  double rho;
  if (n_free > 0) {
    rho = sum_free / static_cast<double>(n_free);
  } else if (std::isfinite(ub) && std::isfinite(lb)) {
    rho = 0.5 * (ub + lb);
  } else {
    rho = std::isfinite(ub) ? ub : (std::isfinite(lb) ? lb : 0.0);
  }
  sol.bias = -rho;
  return sol;
}

namespace {

void check_training_set(std::span<const Sample> samples) {
  bool has_pos = false, has_neg = false;
  for (const auto& s : samples) {
    (s.label == Label::Genuine ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) {
    fail(ErrorCode::DegenerateTrainingSet, "training set needs both genuine and attack samples");
  }
  const Descriptor& first = samples.front().descriptor;
  for (const auto& s : samples) {
    if (s.descriptor.size() != first.size() || !same_stamp(s.descriptor, first)) {
      fail(ErrorCode::DimMismatch, "training samples have mixed descriptor layouts");
    }
  }
}

}  // namespace

Model svm_train(std::span<const Sample> samples, const KernelSpec& kernel, double C,
                const TrainConfig& cfg) {
  kernel.validate();
  if (!(C > 0.0)) fail(ErrorCode::InvalidArgument, "C must be positive");
  if (samples.empty()) fail(ErrorCode::DegenerateTrainingSet, "no training samples");
  check_training_set(samples);

  std::vector<std::span<const double>> xs;
  std::vector<int> labels;
  xs.reserve(samples.size());
  labels.reserve(samples.size());
  for (const auto& s : samples) {
    xs.emplace_back(s.descriptor.values);
    labels.push_back(label_sign(s.label));
  }
  const auto base = pairwise_base(xs, kernel.kind);
  const auto k = kernel_from_base(base, xs.size(), kernel);
  const DualSolution sol = solve_dual(k, labels, C, cfg.tolerance, cfg.max_iterations);

  Model model;
  model.kernel = kernel;
  model.C = C;
  model.bias = sol.bias;
  model.dim = samples.front().descriptor.size();
  model.params = samples.front().descriptor.params;
  model.layout = samples.front().descriptor.layout;
  model.iterations = sol.iterations;
  model.converged = sol.converged;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (sol.alpha[i] > 0.0) {
      model.support.push_back(SupportVector{samples[i].descriptor.values, labels[i], sol.alpha[i]});
    }
  }
  return model;
}

double decision_value(const Model& model, std::span<const double> x) {
  if (x.size() != model.dim) {
    fail(ErrorCode::DimMismatch, "descriptor has " + std::to_string(x.size()) +
                                     " values, model expects " + std::to_string(model.dim));
  }
  double score = model.bias;
  for (const auto& sv : model.support) score += sv.alpha * sv.label * model.kernel(sv.x, x);
  return score;
}

double decision_value(const Model& model, const Descriptor& d) {
  if (d.params != model.params || d.layout != model.layout) {
    fail(ErrorCode::DimMismatch, "descriptor stamp '" + layout_name(d.layout) +
                                     "' does not match model stamp '" +
                                     layout_name(model.layout) + "'");
  }
  return decision_value(model, std::span<const double>(d.values));
}

void write_model(std::ostream& out, const Model& model) {
  BinaryWriter w(out);
  w.magic("CTXM");
  w.u32(kModelFormatVersion);
  w.u8(static_cast<std::uint8_t>(model.kernel.kind));
  w.f64(model.C);
  w.f64(model.kernel.gamma);
  w.u64(model.dim);
  write_stamp(w, model.params, model.layout);
  w.f64(model.bias);
  w.u64(model.support.size());
  for (const auto& sv : model.support) {
    w.u8(sv.label > 0 ? 1 : 0);
    w.f64(sv.alpha);
    w.f64s(sv.x);
  }
}

Model read_model(std::istream& in) {
  BinaryReader r(in, "model");
  r.expect_magic("CTXM");
  if (r.u32() != kModelFormatVersion) r.corrupt("unsupported model version");
  Model m;
  const std::uint8_t kind = r.u8();
  if (kind > 1) r.corrupt("unknown kernel kind");
  m.kernel.kind = static_cast<KernelKind>(kind);
  m.C = r.f64();
  m.kernel.gamma = r.f64();
  m.dim = r.u64();
  read_stamp(r, m.params, m.layout);
  std::size_t layout_dim = 0;
  for (const auto& s : m.layout) layout_dim += static_cast<std::size_t>(s.bins);
  if (layout_dim != m.dim) r.corrupt("dimension stamp disagrees with layout");
  m.bias = r.f64();
  const std::uint64_t count = r.u64();
  if (count > (1u << 26)) r.corrupt("support vector count out of range");
  m.support.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    SupportVector sv;
    sv.label = r.u8() ? 1 : -1;
    sv.alpha = r.f64();
    if (!(sv.alpha >= 0.0 && sv.alpha <= m.C)) r.corrupt("alpha outside [0, C]");
    sv.x = r.f64s(m.dim);
    m.support.push_back(std::move(sv));
  }
  return m;
}

void save_model(const std::filesystem::path& path, const Model& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  write_model(out, model);
  if (!out) fail(ErrorCode::IoError, "failed writing " + path.string());
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open model " + path.string());
  try {
    return read_model(in);
  } catch (const Error& e) {
    fail(e.code(), path.string() + ": " + e.what());
  }
}

namespace {

// JSON has no infinities; an unbounded threshold is stored as a string.
nlohmann::ordered_json threshold_json(double t) {
  if (std::isinf(t)) return t > 0 ? "inf" : "-inf";
  return t;
}

double threshold_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    fail(ErrorCode::FormatError, "bad threshold value \"" + s + "\"");
  }
  return j.get<double>();
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& model_path) {
  auto p = model_path;
  p += ".json";
  return p;
}

void write_model_sidecar(const std::filesystem::path& path, const Model& model,
                         const ModelMeta& meta) {
  nlohmann::ordered_json j;
  j["format"] = "chromatex-model";
  j["version"] = kModelFormatVersion;
  j["descriptor"] = meta.descriptor.empty() ? model.descriptor_name() : meta.descriptor;
  j["kernel"] = kernel_name(model.kernel.kind);
  j["C"] = model.C;
  if (model.kernel.kind == KernelKind::RBF) j["gamma"] = model.kernel.gamma;
  j["dim"] = model.dim;
  j["lbp"] = {{"neighbors", model.params.neighbors},
              {"radius", model.params.radius},
              {"sampling", sampling_name(model.params.sampling)}};
  j["support_vectors"] = model.support.size();
  j["bias"] = model.bias;
  j["converged"] = model.converged;
  j["threshold"] = threshold_json(meta.threshold);
  j["threshold_source"] = meta.threshold_source;
  j["tuning_eer"] = meta.tuning_eer;
  j["folds"] = meta.folds;
  j["seed"] = meta.seed;
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) fail(ErrorCode::IoError, "failed writing " + path.string());
}

ModelMeta read_model_sidecar(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open model sidecar " + path.string());
  try {
    const auto j = nlohmann::json::parse(in);
    ModelMeta meta;
    meta.descriptor = j.value("descriptor", std::string{});
    meta.threshold = threshold_from_json(j.at("threshold"));
    meta.threshold_source = j.value("threshold_source", std::string("cv"));
    meta.tuning_eer = j.value("tuning_eer", 0.0);
    meta.seed = j.value("seed", std::uint64_t{0});
    meta.folds = j.value("folds", 0);
    return meta;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::FormatError, path.string() + ": " + e.what());
  }
}

}  // namespace chromatex
