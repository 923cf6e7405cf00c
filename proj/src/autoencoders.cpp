#include "rdae/autoencoders.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "binary_io.hpp"
#include "rdae/errors.hpp"
#include "rdae/rng.hpp"

namespace rdae {
namespace {

using Clock = std::chrono::steady_clock;

Eigen::MatrixXd random_weights(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(cols));
  Eigen::MatrixXd w(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) w(r, c) = scale * rng.normal();
  return w;
}

void check_pair(const Eigen::MatrixXd& clean, const Eigen::MatrixXd& corrupt) {
  if (clean.rows() != corrupt.rows() || clean.cols() != corrupt.cols())
    throw InvalidConfig("training: clean and corrupt stacks differ in shape");
  if (clean.size() == 0) throw InvalidConfig("training: empty stacks");
  if (!clean.allFinite() || !corrupt.allFinite())
    throw DomainError("training: stacks contain non-finite entries");
}

// Tracks the outer loop: records objective / wall time and decides when to stop.
class OuterLoop {
 public:
  explicit OuterLoop(const TrainOptions& options) : options_(options), start_(Clock::now()) {}

  // Returns true when training should stop after this iteration.
  bool record(double objective, TrainTrace& trace) {
    trace.objective.push_back(objective);
    trace.seconds.push_back(std::chrono::duration<double>(Clock::now() - start_).count());
    if (!std::isfinite(objective)) {
      trace.diverged = true;
      return true;
    }
    const std::size_t n = trace.objective.size();
    if (n >= 2) {
      const double prev = trace.objective[n - 2];
      if (std::abs(prev - objective) <= options_.outer_tolerance * std::abs(prev)) return true;
    }
    return static_cast<int>(n) >= options_.outer_iterations;
  }

 private:
  const TrainOptions& options_;
  Clock::time_point start_;
};

// Minimizes w ||T - A Z||^2 + c ||Z - U||^2 + l1 ||Z||_1 over Z, warm-started
// at `codes`. With l1 == 0 and exact == true the normal equations are solved
// directly.
Eigen::MatrixXd code_update(const Eigen::MatrixXd& upstream, const Eigen::MatrixXd& upstream_target,
                            double upstream_weight, const Eigen::MatrixXd& own_target,
                            double own_weight, double l1, const Eigen::MatrixXd& codes,
                            const TrainOptions& options, bool exact) {
  Eigen::MatrixXd gram = upstream_weight * (upstream.transpose() * upstream);
  gram.diagonal().array() += own_weight;
  Eigen::MatrixXd correlation =
      upstream_weight * (upstream.transpose() * upstream_target) + own_weight * own_target;
  if (exact) {
    if (own_weight > 0.0) {
      Eigen::LLT<Eigen::MatrixXd> llt(gram);
      if (llt.info() == Eigen::Success) return llt.solve(correlation);
    }
    // Decoupled code (own_weight == 0): plain least-squares code for the target.
    LeastSquaresSolver solver(upstream.transpose(), options.ridge);
    return solver.solve(upstream_target.transpose()).transpose();
  }
  const double energy =
      upstream_weight * upstream_target.squaredNorm() + own_weight * own_target.squaredNorm();
  return ista_solve_gram(gram, correlation, energy, l1, codes, options.ista).codes;
}

TrainResult train_shallow(const Eigen::MatrixXd& clean, const Eigen::MatrixXd& corrupt,
                          Eigen::Index hidden, const TrainOptions& options, Variant variant) {
  options.validate();
  check_pair(clean, corrupt);
  if (hidden < 1 || hidden >= clean.rows())
    throw InvalidConfig("training: hidden size must satisfy 1 <= l < P");
  if (variant == Variant::SparseDae && !(options.mu >= 0.0))
    throw DomainError("training: mu must be >= 0");

  const Activation& act = options.activation;
  Rng rng(substream(options.seed, 0xdae));

  TrainResult result;
  AutoencoderWeights& w = result.weights;
  w.variant = variant;
  w.activation = act;
  w.encoders.push_back(random_weights(hidden, clean.rows(), rng));
  w.decoder = random_weights(clean.rows(), hidden, rng);
  Eigen::MatrixXd codes = act.apply(w.encoders[0] * corrupt);

  const LeastSquaresSolver encoder_solver(corrupt, options.ridge);
  const double l1 = variant == Variant::SparseDae ? options.mu : 0.0;
  OuterLoop loop(options);
  for (;;) {
    // Encoder: min ||phi^-1(Z) - W1 X^||^2
    w.encoders[0] = encoder_solver.solve(act.invert(codes));
    // Decoder: min ||X - W2 Z||^2
    w.decoder = solve_least_squares(codes, clean, options.ridge);
    // Codes: min ||X - W2 Z||^2 + lambda ||Z - phi(W1 X^)||^2 (+ mu ||Z||_1)
    const Eigen::MatrixXd encoded = act.apply(w.encoders[0] * corrupt);
    codes = code_update(w.decoder, clean, 1.0, encoded, options.lambda, l1, codes, options,
                        variant == Variant::Dae);
    result.codes = {codes};
    if (loop.record(objective_value(w, result.codes, clean, corrupt, options), result.trace)) break;
  }
  return result;
}

}  // namespace

std::string_view to_string(ActivationKind k) {
  switch (k) {
    case ActivationKind::Linear: return "linear";
    case ActivationKind::Tanh: return "tanh";
    case ActivationKind::Sigmoid: return "sigmoid";
  }
  return "?";
}

ActivationKind parse_activation(std::string_view s) {
  if (s == "linear") return ActivationKind::Linear;
  if (s == "tanh") return ActivationKind::Tanh;
  if (s == "sigmoid") return ActivationKind::Sigmoid;
  throw InvalidConfig("unknown activation '" + std::string(s) + "'");
}

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Dae: return "DAE";
    case Variant::SparseDae: return "SparseDAE";
    case Variant::StackedSdae: return "StackedSDAE";
  }
  return "?";
}

Variant parse_variant(std::string_view s) {
  if (s == "DAE" || s == "dae") return Variant::Dae;
  if (s == "SparseDAE" || s == "sparse_dae") return Variant::SparseDae;
  if (s == "StackedSDAE" || s == "stacked_sdae") return Variant::StackedSdae;
  throw InvalidConfig("unknown autoencoder variant '" + std::string(s) + "'");
}

void Activation::validate() const {
  if (kind != ActivationKind::Linear && !(inverse_clamp > 0.0 && inverse_clamp < 0.1))
    throw InvalidConfig("activation: inverse_clamp must lie in (0, 0.1)");
}

Eigen::MatrixXd Activation::apply(const Eigen::MatrixXd& v) const {
  switch (kind) {
    case ActivationKind::Linear: return v;
    case ActivationKind::Tanh: return v.array().tanh().matrix();
    case ActivationKind::Sigmoid: return (1.0 / (1.0 + (-v.array()).exp())).matrix();
  }
  return v;
}

Eigen::MatrixXd Activation::invert(const Eigen::MatrixXd& v) const {
  switch (kind) {
    case ActivationKind::Linear: return v;
    case ActivationKind::Tanh: {
      const double hi = 1.0 - inverse_clamp;
      return v.unaryExpr([hi](double x) { return std::atanh(std::clamp(x, -hi, hi)); });
    }
    case ActivationKind::Sigmoid: {
      const double lo = inverse_clamp, hi = 1.0 - inverse_clamp;
      return v.unaryExpr([lo, hi](double x) {
        const double c = std::clamp(x, lo, hi);
        return std::log(c / (1.0 - c));
      });
    }
  }
  return v;
}

std::vector<Eigen::Index> AutoencoderWeights::layer_sizes() const {
  std::vector<Eigen::Index> sizes;
  for (const auto& e : encoders) sizes.push_back(e.rows());
  return sizes;
}

std::int64_t AutoencoderWeights::inference_macs() const {
  std::int64_t macs = decoder.size();
  for (const auto& e : encoders) macs += e.size();
  return macs;
}

void AutoencoderWeights::validate() const {
  activation.validate();
  if (encoders.empty()) throw InvalidConfig("weights: no encoder layers");
  const bool shallow = variant != Variant::StackedSdae;
  if (shallow && encoders.size() != 1) throw InvalidConfig("weights: shallow variant needs one encoder");
  Eigen::Index in = decoder.rows();
  for (std::size_t k = 0; k < encoders.size(); ++k) {
    if (encoders[k].cols() != in) throw InvalidConfig("weights: encoder shapes do not chain");
    if (k > 0 && encoders[k].rows() >= encoders[k - 1].rows())
      throw InvalidConfig("weights: stacked layer sizes must strictly decrease");
    in = encoders[k].rows();
  }
  if (decoder.cols() != in) throw InvalidConfig("weights: decoder does not match last layer");
  for (const auto& e : encoders)
    if (!e.allFinite()) throw DomainError("weights: non-finite encoder entries");
  if (!decoder.allFinite()) throw DomainError("weights: non-finite decoder entries");
}

void TrainOptions::validate() const {
  activation.validate();
  if (!(lambda >= 0.0) || !(mu >= 0.0)) throw DomainError("training: regularizers must be >= 0");
  for (double c : coupling)
    if (!(c >= 0.0)) throw DomainError("training: coupling weights must be >= 0");
  for (double s : sparsity)
    if (!(s >= 0.0)) throw DomainError("training: sparsity weights must be >= 0");
  if (outer_iterations < 1) throw InvalidConfig("training: outer_iterations must be >= 1");
  if (!(outer_tolerance >= 0.0)) throw InvalidConfig("training: outer_tolerance must be >= 0");
  ista.validate();
}

TrainResult train_dae(const Eigen::MatrixXd& clean, const Eigen::MatrixXd& corrupt,
                      Eigen::Index hidden, const TrainOptions& options) {
  return train_shallow(clean, corrupt, hidden, options, Variant::Dae);
}

TrainResult train_sparse_dae(const Eigen::MatrixXd& clean, const Eigen::MatrixXd& corrupt,
                             Eigen::Index hidden, const TrainOptions& options) {
  return train_shallow(clean, corrupt, hidden, options, Variant::SparseDae);
}

TrainResult train_stacked_sdae(const Eigen::MatrixXd& clean, const Eigen::MatrixXd& corrupt,
                               const std::vector<Eigen::Index>& sizes,
                               const TrainOptions& options) {
  options.validate();
  check_pair(clean, corrupt);
  const std::size_t depth = sizes.size();
  if (depth == 0) throw InvalidConfig("stacked training: no layer sizes");
  if (sizes[0] < 1) throw InvalidConfig("stacked training: layer sizes must be >= 1");
  for (std::size_t k = 1; k < depth; ++k)
    if (sizes[k] >= sizes[k - 1] || sizes[k] < 1)
      throw InvalidConfig("stacked training: layer sizes must strictly decrease");
  if (options.coupling.size() != depth || options.sparsity.size() != depth)
    throw InvalidConfig("stacked training: need one coupling and one sparsity weight per layer");

  const Activation& act = options.activation;
  Rng rng(substream(options.seed, 0x5dae));

  TrainResult result;
  AutoencoderWeights& w = result.weights;
  w.variant = Variant::StackedSdae;
  w.activation = act;
  std::vector<Eigen::MatrixXd>& codes = result.codes;
  Eigen::Index fan_in = clean.rows();
  for (std::size_t k = 0; k < depth; ++k) {
    w.encoders.push_back(random_weights(sizes[k], fan_in, rng));
    codes.push_back(act.apply(w.encoders[k] * (k == 0 ? corrupt : codes[k - 1])));
    fan_in = sizes[k];
  }
  w.decoder = random_weights(clean.rows(), sizes.back(), rng);

  const LeastSquaresSolver first_encoder_solver(corrupt, options.ridge);
  OuterLoop loop(options);
  for (;;) {
    // Weight blocks: each encoder fits phi^-1 of its code from the layer
    // below, the decoder fits the clean stack from the deepest code.
    w.encoders[0] = first_encoder_solver.solve(act.invert(codes[0]));
    for (std::size_t k = 1; k < depth; ++k)
      w.encoders[k] = solve_least_squares(codes[k - 1], act.invert(codes[k]), options.ridge);
    w.decoder = solve_least_squares(codes.back(), clean, options.ridge);

    // Code blocks, shallowest first. Code k couples to its own encoder output
    // (weight mu_k) and to whatever consumes it: the next encoder (weight
    // mu_{k+1}) or, for the deepest code, the decoder data term.
    for (std::size_t k = 0; k < depth; ++k) {
      const Eigen::MatrixXd& input = k == 0 ? corrupt : codes[k - 1];
      const Eigen::MatrixXd own = act.apply(w.encoders[k] * input);
      if (k + 1 < depth) {
        codes[k] = code_update(w.encoders[k + 1], act.invert(codes[k + 1]), options.coupling[k + 1],
                               own, options.coupling[k], options.sparsity[k], codes[k], options,
                               false);
      } else {
        codes[k] = code_update(w.decoder, clean, 1.0, own, options.coupling[k],
                               options.sparsity[k], codes[k], options, false);
      }
    }
    if (loop.record(objective_value(w, codes, clean, corrupt, options), result.trace)) break;
  }
  return result;
}

Eigen::MatrixXd infer(const AutoencoderWeights& weights, const Eigen::MatrixXd& corrupt) {
  if (weights.encoders.empty()) throw InvalidConfig("infer: weights have no encoder");
  if (corrupt.rows() != weights.encoders[0].cols())
    throw InvalidConfig("infer: input pixel count " + std::to_string(corrupt.rows()) +
                        " does not match weights (" + std::to_string(weights.encoders[0].cols()) +
                        ")");
  Eigen::MatrixXd hidden = weights.activation.apply(weights.encoders[0] * corrupt);
  for (std::size_t k = 1; k < weights.encoders.size(); ++k)
    hidden = weights.activation.apply(weights.encoders[k] * hidden);
  Eigen::MatrixXd out = weights.decoder * hidden;
  return out.cwiseMax(0.0).cwiseMin(1.0);
}

double objective_value(const AutoencoderWeights& weights, const std::vector<Eigen::MatrixXd>& codes,
                       const Eigen::MatrixXd& clean, const Eigen::MatrixXd& corrupt,
                       const TrainOptions& options) {
  if (clean.rows() != corrupt.rows() || clean.cols() != corrupt.cols())
    throw InvalidConfig("objective: clean and corrupt stacks differ in shape");
  if (codes.size() != weights.encoders.size())
    throw InvalidConfig("objective: one code matrix per encoder layer required");
  const Activation& act = weights.activation;
  const Eigen::MatrixXd* input = &corrupt;
  for (std::size_t k = 0; k < codes.size(); ++k) {
    if (weights.encoders[k].cols() != input->rows() || codes[k].rows() != weights.encoders[k].rows() ||
        codes[k].cols() != clean.cols())
      throw InvalidConfig("objective: code / weight shapes do not chain");
    input = &codes[k];
  }
  if (weights.decoder.rows() != clean.rows() || weights.decoder.cols() != codes.back().rows())
    throw InvalidConfig("objective: decoder shape mismatch");

  const double data = (clean - weights.decoder * codes.back()).squaredNorm();
  if (weights.variant != Variant::StackedSdae) {
    const double coupling = (codes[0] - act.apply(weights.encoders[0] * corrupt)).squaredNorm();
    double value = data + options.lambda * coupling;
    if (weights.variant == Variant::SparseDae) value += options.mu * codes[0].cwiseAbs().sum();
    return value;
  }
  if (options.coupling.size() != codes.size() || options.sparsity.size() != codes.size())
    throw InvalidConfig("objective: need one coupling and one sparsity weight per layer");
  double value = data;
  for (std::size_t k = 0; k < codes.size(); ++k) {
    const Eigen::MatrixXd& in = k == 0 ? corrupt : codes[k - 1];
    value += options.coupling[k] * (act.invert(codes[k]) - weights.encoders[k] * in).squaredNorm();
    value += options.sparsity[k] * codes[k].cwiseAbs().sum();
  }
  return value;
}

namespace {
constexpr std::string_view kWeightsMagic = "RDAEW1";

void put_matrix(detail::ByteWriter& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) out.f64(m.data()[i]);
}

Eigen::MatrixXd get_matrix(detail::ByteReader& in, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = in.f64();
  return m;
}
}  // namespace

void save_weights(const AutoencoderWeights& weights, const std::filesystem::path& path) {
  weights.validate();
  detail::ByteWriter out;
  out.bytes(kWeightsMagic);
  out.u8(static_cast<std::uint8_t>(weights.variant));
  out.u8(static_cast<std::uint8_t>(weights.activation.kind));
  out.u32(static_cast<std::uint32_t>(weights.pixels()));
  out.u32(static_cast<std::uint32_t>(weights.encoders.size()));
  for (Eigen::Index s : weights.layer_sizes()) out.u32(static_cast<std::uint32_t>(s));
  for (const auto& e : weights.encoders) put_matrix(out, e);
  put_matrix(out, weights.decoder);
  detail::write_file(path.string(), out.buffer());
}

AutoencoderWeights load_weights(const std::filesystem::path& path) {
  const std::vector<char> bytes = detail::read_file(path.string());
  detail::ByteReader in(bytes, path.string());
  if (in.bytes(kWeightsMagic.size()) != kWeightsMagic)
    throw FormatError(path.string() + ": bad weights magic");
  AutoencoderWeights w;
  const std::uint8_t variant = in.u8();
  const std::uint8_t activation = in.u8();
  if (variant > 2) throw FormatError(path.string() + ": unknown variant tag");
  if (activation > 2) throw FormatError(path.string() + ": unknown activation tag");
  w.variant = static_cast<Variant>(variant);
  w.activation.kind = static_cast<ActivationKind>(activation);
  const Eigen::Index pixels = in.u32();
  const std::uint32_t depth = in.u32();
  if (depth == 0 || depth > 64) throw FormatError(path.string() + ": bad layer count");
  std::vector<Eigen::Index> sizes;
  for (std::uint32_t k = 0; k < depth; ++k) sizes.push_back(in.u32());
  std::uint64_t expected = 0;
  Eigen::Index fan_in = pixels;
  for (Eigen::Index s : sizes) {
    expected += static_cast<std::uint64_t>(s) * static_cast<std::uint64_t>(fan_in);
    fan_in = s;
  }
  expected += static_cast<std::uint64_t>(pixels) * static_cast<std::uint64_t>(fan_in);
  if (in.remaining() != expected * 8) throw FormatError(path.string() + ": payload size mismatch");
  fan_in = pixels;
  for (Eigen::Index s : sizes) {
    w.encoders.push_back(get_matrix(in, s, fan_in));
    fan_in = s;
  }
  w.decoder = get_matrix(in, pixels, fan_in);
  try {
    w.validate();
  } catch (const std::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return w;
}

}  // namespace rdae
