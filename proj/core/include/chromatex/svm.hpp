#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chromatex/descriptor.hpp"
#include "chromatex/sample.hpp"

namespace chromatex {

enum class KernelKind : std::uint8_t { Linear = 0, RBF = 1 };

std::string_view kernel_name(KernelKind kind) noexcept;
KernelKind parse_kernel(std::string_view name);

struct KernelSpec {
  KernelKind kind = KernelKind::RBF;
  double gamma = 1.0;  // RBF only: K(a,b) = exp(-gamma |a-b|^2)

  void validate() const;
  double operator()(std::span<const double> a, std::span<const double> b) const;

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

struct TrainConfig {
  std::vector<double> c_grid{0.1, 1.0, 10.0, 100.0, 1000.0};
  std::vector<double> gamma_grid{0.0078125, 0.015625, 0.03125, 0.0625, 0.125, 0.25,
                                 0.5,       1.0,      2.0,     4.0,    8.0};
  double tolerance = 1e-4;  // stop when the maximal KKT violation drops below this
  std::size_t max_iterations = 10'000'000;

  void validate() const;
};

struct SupportVector {
  std::vector<double> x;
  int label = 1;  // +1 genuine, -1 attack
  double alpha = 0.0;
};

/// A trained soft-margin SVM. Only vectors with alpha > 0 are kept.
struct Model {
  KernelSpec kernel;
  double C = 1.0;
  std::vector<SupportVector> support;
  double bias = 0.0;
  std::size_t dim = 0;
  LbpParams params;
  std::vector<Segment> layout;
  std::size_t iterations = 0;
  bool converged = true;

  /// sum_i alpha_i y_i x_i; only meaningful for the linear kernel.
  std::optional<std::vector<double>> weight_vector() const;
  std::string descriptor_name() const { return layout_name(layout); }
};

/// Symmetric n x n kernel matrix, row-major.
struct KernelMatrix {
  std::size_t n = 0;
  std::vector<double> values;

  double operator()(std::size_t i, std::size_t j) const noexcept { return values[i * n + j]; }
  /// Rows and columns restricted to `idx`, in that order.
  KernelMatrix subset(std::span<const std::size_t> idx) const;
};

/// Dot products (linear) or squared distances (RBF) between all pairs.
/// Precomputed once and reused across gamma values and folds.
std::vector<double> pairwise_base(std::span<const std::span<const double>> xs, KernelKind kind);
KernelMatrix kernel_from_base(const std::vector<double>& base, std::size_t n,
                              const KernelSpec& kernel);

struct DualSolution {
  std::vector<double> alpha;
  double bias = 0.0;
  std::size_t iterations = 0;
  bool converged = true;
  /// max_{I_up} -y G - min_{I_low} -y G at exit (0 when one set is empty).
  double kkt_gap = 0.0;
};

/// Solves min 1/2 a'Qa - e'a s.t. y'a = 0, 0 <= a <= C with Q_ij =
/// y_i y_j K_ij, by sequential minimal optimization with second-order
/// working-set selection.
DualSolution solve_dual(const KernelMatrix& k, std::span<const int> labels, double C,
                        double tolerance, std::size_t max_iterations);

/// Trains on window samples; genuine = +1, attack = -1.
Model svm_train(std::span<const Sample> samples, const KernelSpec& kernel, double C,
                const TrainConfig& cfg);

/// sum alpha_i y_i K(x_i, d) + bias; positive leans genuine.
double decision_value(const Model& model, const Descriptor& d);
double decision_value(const Model& model, std::span<const double> x);

// Model persistence: "CTXM" binary (version, kernel, C, gamma, dim, stamp,
// bias, support vectors as little-endian doubles) plus a JSON sidecar.
inline constexpr std::uint32_t kModelFormatVersion = 1;

void write_model(std::ostream& out, const Model& model);
Model read_model(std::istream& in);
void save_model(const std::filesystem::path& path, const Model& model);
Model load_model(const std::filesystem::path& path);

/// Tuning outcome stored next to the model as JSON (`<model>.json`).
struct ModelMeta {
  std::string descriptor;
  double threshold = 0.0;              // operating point, accept iff score >= threshold
  std::string threshold_source = "cv";  // "cv" or "dev"
  double tuning_eer = 0.0;
  std::uint64_t seed = 0;
  int folds = 0;
};

std::filesystem::path sidecar_path(const std::filesystem::path& model_path);
void write_model_sidecar(const std::filesystem::path& path, const Model& model,
                         const ModelMeta& meta);
ModelMeta read_model_sidecar(const std::filesystem::path& path);

}  // namespace chromatex
