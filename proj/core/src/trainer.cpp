#include "rwcscope/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "rwcscope/error.hpp"
#include "rwcscope/format.hpp"
#include "rwcscope/random.hpp"

namespace rwcscope {

void MlpSpec::validate() const {
  if (input_dim == 0 || num_classes == 0 || hidden_dims.empty()) {
    fail(ErrorKind::InvalidArgument, "MLP needs positive input/class dims and >= 1 hidden layer");
  }
  for (auto h : hidden_dims) {
    if (h == 0) fail(ErrorKind::InvalidArgument, "hidden layer widths must be positive");
  }
}

Mlp::Mlp(MlpSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  std::vector<std::size_t> widths{spec_.input_dim};
  widths.insert(widths.end(), spec_.hidden_dims.begin(), spec_.hidden_dims.end());
  widths.push_back(spec_.num_classes);

  std::size_t offset = 0;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    Slice s{widths[i], widths[i + 1], offset, offset + widths[i] * widths[i + 1]};
    offset = s.bias_offset + s.out;
    slices_.push_back(s);
  }
  params_.assign(offset, 0.0);
}

Mlp Mlp::glorot_uniform(MlpSpec spec, std::uint64_t seed) {
  Mlp mlp(std::move(spec));
  Rng rng(seed);
  for (std::size_t l = 0; l < mlp.layer_count(); ++l) {
    const auto& s = mlp.slices_[l];
    const double a = std::sqrt(6.0 / static_cast<double>(s.in + s.out));
    for (double& w : mlp.weight(l)) w = uniform(rng, -a, a);
    for (double& b : mlp.bias(l)) b = uniform(rng, -a, a);
  }
  return mlp;
}

std::span<double> Mlp::weight(std::size_t layer) {
  const auto& s = slices_.at(layer);
  return {params_.data() + s.weight_offset, s.in * s.out};
}
std::span<double> Mlp::bias(std::size_t layer) {
  const auto& s = slices_.at(layer);
  return {params_.data() + s.bias_offset, s.out};
}
std::span<const double> Mlp::weight(std::size_t layer) const {
  const auto& s = slices_.at(layer);
  return {params_.data() + s.weight_offset, s.in * s.out};
}
std::span<const double> Mlp::bias(std::size_t layer) const {
  const auto& s = slices_.at(layer);
  return {params_.data() + s.bias_offset, s.out};
}

ForwardCache Mlp::forward(const Matrix& inputs) const {
  if (inputs.cols() != spec_.input_dim) {
    fail(ErrorKind::ShapeMismatch, "MLP expects " + std::to_string(spec_.input_dim) +
                                       " input features, got " + std::to_string(inputs.cols()));
  }
  const std::size_t batch = inputs.rows();
  ForwardCache cache;
  cache.inputs.push_back(inputs);

  for (std::size_t l = 0; l < layer_count(); ++l) {
    const auto& s = slices_[l];
    const Matrix& x = cache.inputs.back();
    const auto w = weight(l);
    const auto b = bias(l);
    const bool hidden = l + 1 < layer_count();
    Matrix z(batch, s.out);
    for (std::size_t n = 0; n < batch; ++n) {
      const auto xn = x.row(n);
      auto zn = z.row(n);
      for (std::size_t o = 0; o < s.out; ++o) {
        const double* wo = w.data() + o * s.in;
        double acc = b[o];
        for (std::size_t i = 0; i < s.in; ++i) acc += wo[i] * xn[i];
        zn[o] = hidden ? std::max(acc, 0.0) : acc;
      }
    }
    if (hidden) {
      cache.inputs.push_back(std::move(z));
    } else {
      cache.logits = std::move(z);
    }
  }
  return cache;
}

double softmax_cross_entropy(const Matrix& logits, std::span<const std::size_t> labels) {
  if (labels.size() != logits.rows()) {
    fail(ErrorKind::ShapeMismatch, "one label per logit row required");
  }
  double total = 0.0;
  for (std::size_t n = 0; n < logits.rows(); ++n) {
    const auto z = logits.row(n);
    if (labels[n] >= z.size()) {
      fail(ErrorKind::LabelOutOfRange, "label " + std::to_string(labels[n]) + " >= " +
                                           std::to_string(z.size()) + " classes");
    }
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - zmax);
    total += zmax + std::log(sum) - z[labels[n]];
  }
  return logits.rows() ? total / static_cast<double>(logits.rows()) : 0.0;
}

LossAndGradient Mlp::backward(const ForwardCache& cache, std::span<const std::size_t> labels) const {
  const std::size_t batch = cache.logits.rows();
  LossAndGradient out;
  out.loss = softmax_cross_entropy(cache.logits, labels);
  out.gradient.assign(params_.size(), 0.0);
  if (batch == 0) return out;

  // dL/dz for the logit layer: (softmax - onehot) / batch
  Matrix delta(batch, spec_.num_classes);
  for (std::size_t n = 0; n < batch; ++n) {
    const auto z = cache.logits.row(n);
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - zmax);
    auto d = delta.row(n);
    for (std::size_t c = 0; c < z.size(); ++c) {
      d[c] = std::exp(z[c] - zmax) / sum - (c == labels[n] ? 1.0 : 0.0);
      d[c] /= static_cast<double>(batch);
    }
  }

  for (std::size_t l = layer_count(); l-- > 0;) {
    const auto& s = slices_[l];
    const Matrix& x = cache.inputs[l];
    double* gw = out.gradient.data() + s.weight_offset;
    double* gb = out.gradient.data() + s.bias_offset;
    for (std::size_t n = 0; n < batch; ++n) {
      const auto dn = delta.row(n);
      const auto xn = x.row(n);
      for (std::size_t o = 0; o < s.out; ++o) {
        const double g = dn[o];
        if (g == 0.0) continue;
        gb[o] += g;
        double* row = gw + o * s.in;
        for (std::size_t i = 0; i < s.in; ++i) row[i] += g * xn[i];
      }
    }
    if (l == 0) break;

    // Back through the weights, then the ReLU that produced x.
    const auto w = weight(l);
    Matrix prev(batch, s.in);
    for (std::size_t n = 0; n < batch; ++n) {
      const auto dn = delta.row(n);
      const auto xn = x.row(n);
      auto pn = prev.row(n);
      for (std::size_t o = 0; o < s.out; ++o) {
        const double g = dn[o];
        if (g == 0.0) continue;
        const double* wo = w.data() + o * s.in;
        for (std::size_t i = 0; i < s.in; ++i) pn[i] += g * wo[i];
      }
      for (std::size_t i = 0; i < s.in; ++i) {
        if (!(xn[i] > 0.0)) pn[i] = 0.0;
      }
    }
    delta = std::move(prev);
  }
  return out;
}

double Mlp::loss(const Matrix& inputs, std::span<const std::size_t> labels) const {
  return softmax_cross_entropy(forward(inputs).logits, labels);
}

std::vector<std::size_t> Mlp::predict(const Matrix& inputs) const {
  const auto logits = forward(inputs).logits;
  std::vector<std::size_t> out(logits.rows());
  for (std::size_t n = 0; n < logits.rows(); ++n) {
    const auto z = logits.row(n);
    out[n] = static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin());
  }
  return out;
}

double Mlp::accuracy(const Matrix& inputs, std::span<const std::size_t> labels) const {
  const auto pred = predict(inputs);
  if (pred.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t n = 0; n < pred.size(); ++n) hits += pred[n] == labels[n];
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

WeightSnapshot Mlp::snapshot(std::uint32_t epoch, DType dtype) const {
  WeightSnapshot snap;
  snap.epoch_index = epoch;
  for (std::size_t l = 0; l < layer_count(); ++l) {
    const auto& s = slices_[l];
    const auto w = weight(l);
    const auto b = bias(l);
    const std::string prefix = "layer" + std::to_string(l);
    snap.layers.push_back({prefix + ".weight", dtype,
                           {static_cast<std::uint32_t>(s.out), static_cast<std::uint32_t>(s.in)},
                           {w.begin(), w.end()}});
    snap.layers.push_back(
        {prefix + ".bias", dtype, {static_cast<std::uint32_t>(s.out)}, {b.begin(), b.end()}});
  }
  return snap;
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state) {
  if (grads.size() != params.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    fail(ErrorKind::ShapeMismatch, "Adam parameters, gradients and moments differ in size");
  }
  const auto& c = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * g;
    state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * g * g;
    const double m_hat = state.m[i] / correction1;
    const double v_hat = state.v[i] / correction2;
    params[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.epsilon);
  }
}

Dataset make_blobs(const SyntheticTask& task) {
  if (task.num_classes < 2 || task.samples_per_class == 0 || task.input_dim == 0) {
    fail(ErrorKind::InvalidArgument, "blobs need >= 2 classes and positive sizes");
  }
  Rng rng(task.seed);
  Matrix centers(task.num_classes, task.input_dim);
  for (double& v : centers.data()) v = uniform(rng, -task.center_spread, task.center_spread);

  Dataset data;
  data.inputs = Matrix(task.num_classes * task.samples_per_class, task.input_dim);
  data.labels.reserve(data.inputs.rows());
  std::size_t row = 0;
  for (std::size_t c = 0; c < task.num_classes; ++c) {
    for (std::size_t s = 0; s < task.samples_per_class; ++s, ++row) {
      auto x = data.inputs.row(row);
      const auto center = centers.row(c);
      for (std::size_t d = 0; d < task.input_dim; ++d) {
        x[d] = center[d] + task.noise * standard_normal(rng);
      }
      data.labels.push_back(c);
    }
  }
  return data;
}

namespace {

std::string join_dims(const std::vector<std::size_t>& dims) {
  std::string out;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(dims[i]);
  }
  return out;
}

}  // namespace

TrainResult train_run(const SyntheticTask& task, const MlpSpec& spec, const TrainConfig& config,
                      const std::filesystem::path& out_dir) {
  if (config.epochs == 0 || config.batch_size == 0) {
    fail(ErrorKind::InvalidArgument, "epochs and batch size must be positive");
  }
  if (spec.input_dim != task.input_dim || spec.num_classes != task.num_classes) {
    fail(ErrorKind::ShapeMismatch, "MLP spec does not match the task's input/class dims");
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    fail(ErrorKind::Io, "cannot create output directory '" + out_dir.string() + "'");
  }

  const Dataset data = make_blobs(task);
  Mlp model = Mlp::glorot_uniform(spec, config.seed);
  AdamState adam(model.parameters().size(), config.adam);
  Rng shuffle_rng(config.seed ^ 0x9E3779B97F4A7C15ULL);

  TrainResult result;
  auto& manifest = result.manifest;
  auto save = [&](std::uint32_t epoch) {
    const std::string name = "epoch_" + std::to_string(epoch) + ".wsnp";
    write_snapshot(model.snapshot(epoch, config.snapshot_dtype), out_dir / name);
    manifest.snapshots.push_back(name);
  };
  save(0);

  const std::size_t n = data.inputs.rows();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[uniform_index(shuffle_rng, i)]);

    double loss_sum = 0.0;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t end = std::min(n, start + config.batch_size);
      Matrix batch(end - start, data.inputs.cols());
      std::vector<std::size_t> labels(end - start);
      for (std::size_t j = start; j < end; ++j) {
        auto src = data.inputs.row(order[j]);
        std::copy(src.begin(), src.end(), batch.row(j - start).begin());
        labels[j - start] = data.labels[order[j]];
      }
      const auto step = model.backward(model.forward(batch), labels);
      if (!std::isfinite(step.loss)) fail(ErrorKind::NonFinite, "training loss diverged");
      loss_sum += step.loss * static_cast<double>(end - start);
      adam_step(model.parameters(), step.gradient, adam);
    }
    result.epoch_mean_loss.push_back(loss_sum / static_cast<double>(n));
    result.epoch_train_accuracy.push_back(model.accuracy(data.inputs, data.labels));
    save(static_cast<std::uint32_t>(epoch));
  }
  result.final_train_accuracy = result.epoch_train_accuracy.back();

  {
    std::ofstream log(out_dir / "training_log.csv", std::ios::binary | std::ios::trunc);
    if (!log) fail(ErrorKind::Io, "cannot write training_log.csv in '" + out_dir.string() + "'");
    log << "epoch,mean_loss,train_accuracy\n";
    for (std::size_t e = 0; e < config.epochs; ++e) {
      log << (e + 1) << ',' << format_real(result.epoch_mean_loss[e]) << ','
          << format_real(result.epoch_train_accuracy[e]) << '\n';
    }
  }

  manifest.run_id = "blobs-c" + std::to_string(task.num_classes) + "-seed" +
                    std::to_string(config.seed);
  manifest.model_name = "mlp-" + std::to_string(spec.input_dim) + "-" +
                        join_dims(spec.hidden_dims) + "-" + std::to_string(spec.num_classes);
  std::replace(manifest.model_name.begin(), manifest.model_name.end(), ',', '-');
  manifest.dataset_name = "blobs-c" + std::to_string(task.num_classes);
  auto& h = manifest.hyperparameters;
  h["optimizer"] = std::string("adam");
  h["lr"] = config.adam.lr;
  h["beta1"] = config.adam.beta1;
  h["beta2"] = config.adam.beta2;
  h["epsilon"] = config.adam.epsilon;
  h["batch_size"] = static_cast<std::int64_t>(config.batch_size);
  h["epochs"] = static_cast<std::int64_t>(config.epochs);
  h["seed"] = static_cast<std::int64_t>(config.seed);
  h["hidden"] = join_dims(spec.hidden_dims);
  h["input_dim"] = static_cast<std::int64_t>(task.input_dim);
  h["num_classes"] = static_cast<std::int64_t>(task.num_classes);
  h["samples_per_class"] = static_cast<std::int64_t>(task.samples_per_class);
  h["center_spread"] = task.center_spread;
  h["noise"] = task.noise;
  h["init"] = std::string("glorot_uniform");
  h["snapshot_dtype"] = std::string(config.snapshot_dtype == DType::F32 ? "f32" : "f64");
  h["final_train_accuracy"] = result.final_train_accuracy;
  h["final_mean_loss"] = result.epoch_mean_loss.back();

  result.manifest_path = out_dir / "manifest.json";
  write_manifest(manifest, result.manifest_path);
  return result;
}

}  // namespace rwcscope
