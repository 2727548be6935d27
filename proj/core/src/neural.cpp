#include "sliceparse/neural.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>

namespace sliceparse {

using Mat = Eigen::MatrixXd;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CRowMap = Eigen::Map<const RowMat>;
using CVecMap = Eigen::Map<const Eigen::VectorXd>;
using RowMap = Eigen::Map<RowMat>;
using VecMap = Eigen::Map<Eigen::VectorXd>;

void check(const NetConfig& c) {
  if (c.input_rows < 1 || c.input_cols < 1) throw std::invalid_argument("net: input size must be positive");
  if (c.conv1_channels < 1 || c.conv2_channels < 1) throw std::invalid_argument("net: channel counts must be positive");
  if (c.mlp_widths.empty()) throw std::invalid_argument("net: at least one dense layer is required");
  for (int w : c.mlp_widths) {
    if (w < 1) throw std::invalid_argument("net: dense widths must be positive");
  }
  if (c.max_corners < 1) throw std::invalid_argument("net: max_corners must be positive");
  if (c.max_steps < 1) throw std::invalid_argument("net: max_steps must be positive");
}

// ---------------------------------------------------------------------------
// Encoding

namespace {

// weights(o, i): share of input cell i in output cell o, for area averaging.
Mat area_weights(int out, int in) {
  Mat w = Mat::Zero(out, in);
  const double scale = static_cast<double>(in) / out;
  for (int o = 0; o < out; ++o) {
    const double lo = o * scale, hi = (o + 1) * scale;
    for (int i = static_cast<int>(std::floor(lo)); i < in && i < hi; ++i) {
      const double overlap = std::min(hi, i + 1.0) - std::max(lo, static_cast<double>(i));
      if (overlap > 0.0) w(o, i) = overlap / scale;
    }
  }
  return w;
}

double coord(int i, int n) { return n > 1 ? -1.0 + 2.0 * i / (n - 1) : 0.0; }

}  // namespace

std::vector<double> area_downsample(const Mask& mask, int rows, int cols) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("downsample target must be positive");
  if (mask.empty()) return std::vector<double>(static_cast<std::size_t>(rows) * cols, 0.0);
  Mat m(mask.rows(), mask.cols());
  for (int r = 0; r < mask.rows(); ++r) {
    for (int c = 0; c < mask.cols(); ++c) m(r, c) = mask(r, c) ? 1.0 : 0.0;
  }
  const Mat out = area_weights(rows, mask.rows()) * m * area_weights(cols, mask.cols()).transpose();
  std::vector<double> flat(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) flat[static_cast<std::size_t>(r) * cols + c] = out(r, c);
  }
  return flat;
}

EncodedState encode_state(const ParseState& state, const NetConfig& config) {
  const int R = config.input_rows, C = config.input_cols;
  const std::size_t plane = static_cast<std::size_t>(R) * C;
  EncodedState e;
  e.image.assign(static_cast<std::size_t>(config.image_size()), 0.0f);
  if (config.use_projections) {
    for (std::size_t v = 0; v < 3; ++v) {
      const auto img = area_downsample(state.projections[v].pixels, R, C);
      std::transform(img.begin(), img.end(), e.image.begin() + static_cast<std::ptrdiff_t>(v * plane),
                     [](double x) { return static_cast<float>(x); });
    }
  }
  for (int r = 0; r < R; ++r) {
    for (int c = 0; c < C; ++c) {
      const std::size_t pos = static_cast<std::size_t>(r) * C + c;
      e.image[3 * plane + pos] = static_cast<float>(coord(r, R));
      e.image[4 * plane + pos] = static_cast<float>(coord(c, C));
    }
  }
  e.extras.reserve(static_cast<std::size_t>(config.extra_dim()));
  e.extras.push_back(static_cast<float>(static_cast<double>(state.step_index) / config.max_steps));
  for (std::size_t v = 0; v < 3; ++v) {
    const auto& list = state.corner_lists[v];
    for (int n = 0; n < config.max_corners; ++n) {
      const Point2 p = static_cast<std::size_t>(n) < list.size() ? list[static_cast<std::size_t>(n)] : kNoCorner;
      e.extras.push_back(static_cast<float>(p.x));
      e.extras.push_back(static_cast<float>(p.y));
    }
  }
  return e;
}

Batch Batch::from(std::span<const EncodedState> states, const NetConfig& config) {
  std::vector<const EncodedState*> ptrs;
  for (const auto& s : states) ptrs.push_back(&s);
  return from(std::span<const EncodedState* const>(ptrs), config);
}

Batch Batch::from(std::span<const EncodedState* const> states, const NetConfig& config) {
  Batch b;
  b.size = static_cast<int>(states.size());
  const auto is = static_cast<std::size_t>(config.image_size());
  const auto es = static_cast<std::size_t>(config.extra_dim());
  b.images.resize(is * states.size());
  b.extras.resize(es * states.size());
  for (std::size_t n = 0; n < states.size(); ++n) {
    const EncodedState& s = *states[n];
    if (s.image.size() != is || s.extras.size() != es) {
      throw std::invalid_argument("encoded state does not match the network config");
    }
    std::copy(s.image.begin(), s.image.end(), b.images.begin() + static_cast<std::ptrdiff_t>(n * is));
    std::copy(s.extras.begin(), s.extras.end(), b.extras.begin() + static_cast<std::ptrdiff_t>(n * es));
  }
  return b;
}

// ---------------------------------------------------------------------------
// Network

namespace {

struct ConvShape {
  int cin = 0, h = 0, w = 0, cout = 0, hout = 0, wout = 0;
  int in_positions() const { return h * w; }
  int out_positions() const { return hout * wout; }
};

ConvShape conv_shape(int cin, int h, int w, int cout) {
  // 3x3 kernel, stride 2, padding 1.
  return {cin, h, w, cout, (h - 1) / 2 + 1, (w - 1) / 2 + 1};
}

// Activations are (channels x positions*batch), column b*P + pos.
// For output position o and tap t (ky*3 + kx), the input position read, or -1
// for padding.
std::vector<int> tap_table(const ConvShape& s) {
  std::vector<int> table(static_cast<std::size_t>(s.out_positions()) * 9, -1);
  for (int oy = 0; oy < s.hout; ++oy) {
    for (int ox = 0; ox < s.wout; ++ox) {
      for (int ky = 0; ky < 3; ++ky) {
        for (int kx = 0; kx < 3; ++kx) {
          const int y = 2 * oy - 1 + ky, x = 2 * ox - 1 + kx;
          if (y >= 0 && y < s.h && x >= 0 && x < s.w) table[(oy * s.wout + ox) * 9 + ky * 3 + kx] = y * s.w + x;
        }
      }
    }
  }
  return table;
}

void im2col(const Mat& in, const ConvShape& s, const std::vector<int>& taps, int batch, Mat& patches) {
  const int P = s.out_positions(), Pin = s.in_positions();
  patches.resize(s.cin * 9, static_cast<Eigen::Index>(P) * batch);
  for (int b = 0; b < batch; ++b) {
    for (int o = 0; o < P; ++o) {
      double* col = patches.col(static_cast<Eigen::Index>(b) * P + o).data();
      const int* tap = taps.data() + static_cast<std::size_t>(o) * 9;
      for (int t = 0; t < 9; ++t) {
        if (tap[t] < 0) {
          for (int c = 0; c < s.cin; ++c) col[c * 9 + t] = 0.0;
        } else {
          const double* src = in.col(static_cast<Eigen::Index>(b) * Pin + tap[t]).data();
          for (int c = 0; c < s.cin; ++c) col[c * 9 + t] = src[c];
        }
      }
    }
  }
}

Mat col2im(const Mat& patches, const ConvShape& s, const std::vector<int>& taps, int batch) {
  const int P = s.out_positions(), Pin = s.in_positions();
  Mat out = Mat::Zero(s.cin, static_cast<Eigen::Index>(Pin) * batch);
  for (int b = 0; b < batch; ++b) {
    for (int o = 0; o < P; ++o) {
      const double* col = patches.col(static_cast<Eigen::Index>(b) * P + o).data();
      const int* tap = taps.data() + static_cast<std::size_t>(o) * 9;
      for (int t = 0; t < 9; ++t) {
        if (tap[t] < 0) continue;
        double* dst = out.col(static_cast<Eigen::Index>(b) * Pin + tap[t]).data();
        for (int c = 0; c < s.cin; ++c) dst[c] += col[c * 9 + t];
      }
    }
  }
  return out;
}

void require_finite(const Mat& m, const std::string& layer) {
  if (!m.allFinite()) throw std::runtime_error("non-finite activation in layer " + layer);
}

struct Dense {
  int in = 0, out = 0;
  std::size_t w_offset = 0, b_offset = 0;
};

}  // namespace

// Shared between caches when several heads run on one batch; a shared trunk
// is never written again.
struct ConvTrunk {
  Mat x0, p1, z1, a1, p2, z2;
};

struct ForwardCache::Data {
  int batch = 0;
  std::shared_ptr<ConvTrunk> trunk;
  std::vector<Mat> dense_in;  // input of each dense layer
  std::vector<Mat> dense_z;   // pre-activation of each dense layer
  Mat output;
};

ForwardCache::ForwardCache() : data(std::make_unique<Data>()) {}
ForwardCache::~ForwardCache() = default;
ForwardCache::ForwardCache(ForwardCache&&) noexcept = default;
ForwardCache& ForwardCache::operator=(ForwardCache&&) noexcept = default;

struct Network::Impl {
  ConvShape c1, c2;
  std::vector<int> taps1, taps2;
  std::size_t c1_w = 0, c1_b = 0, c2_w = 0, c2_b = 0;
  int flat = 0;
  std::vector<Dense> dense;
  std::vector<ParamGroup> groups;
  std::size_t count = 0;
};

Network::Network(NetConfig config, NetKind kind) : config_(std::move(config)), kind_(kind) {
  check(config_);
  impl_ = std::make_unique<Impl>();
  Impl& m = *impl_;
  auto add = [&](const std::string& name, std::size_t size) {
    m.groups.push_back({name, m.count, size});
    m.count += size;
    return m.groups.back().offset;
  };
  m.c1 = conv_shape(NetConfig::kImageChannels, config_.input_rows, config_.input_cols, config_.conv1_channels);
  m.c2 = conv_shape(m.c1.cout, m.c1.hout, m.c1.wout, config_.conv2_channels);
  m.taps1 = tap_table(m.c1);
  m.taps2 = tap_table(m.c2);
  m.c1_w = add("conv1.weight", static_cast<std::size_t>(m.c1.cout) * m.c1.cin * 9);
  m.c1_b = add("conv1.bias", static_cast<std::size_t>(m.c1.cout));
  m.c2_w = add("conv2.weight", static_cast<std::size_t>(m.c2.cout) * m.c2.cin * 9);
  m.c2_b = add("conv2.bias", static_cast<std::size_t>(m.c2.cout));
  m.flat = m.c2.cout * m.c2.out_positions();
  int in = m.flat + config_.extra_dim() + (kind_ == NetKind::Critic ? NetConfig::kActionDim : 0);
  std::vector<int> widths = config_.mlp_widths;
  widths.push_back(output_dim());
  for (std::size_t l = 0; l < widths.size(); ++l) {
    Dense d;
    d.in = in;
    d.out = widths[l];
    const std::string name = l + 1 == widths.size() ? "head" : "dense" + std::to_string(l + 1);
    d.w_offset = add(name + ".weight", static_cast<std::size_t>(d.in) * d.out);
    d.b_offset = add(name + ".bias", static_cast<std::size_t>(d.out));
    m.dense.push_back(d);
    in = d.out;
  }
}

Network::~Network() = default;
Network::Network(const Network& o) : config_(o.config_), kind_(o.kind_), impl_(std::make_unique<Impl>(*o.impl_)) {}
Network& Network::operator=(const Network& o) {
  if (this != &o) {
    config_ = o.config_;
    kind_ = o.kind_;
    impl_ = std::make_unique<Impl>(*o.impl_);
  }
  return *this;
}
Network::Network(Network&&) noexcept = default;
Network& Network::operator=(Network&&) noexcept = default;

std::size_t Network::param_count() const { return impl_->count; }
const std::vector<ParamGroup>& Network::groups() const { return impl_->groups; }

void round_to_float(ParamVector& params) {
  for (double& p : params) p = static_cast<double>(static_cast<float>(p));
}

ParamVector Network::initialize(std::uint64_t seed) const {
  const Impl& m = *impl_;
  ParamVector p(m.count, 0.0);
  std::mt19937_64 rng(seed);
  auto fill = [&](std::size_t offset, std::size_t size, double bound) {
    std::uniform_real_distribution<double> u(-bound, bound);
    for (std::size_t n = 0; n < size; ++n) p[offset + n] = u(rng);
  };
  const double b1 = 1.0 / std::sqrt(m.c1.cin * 9.0), b2 = 1.0 / std::sqrt(m.c2.cin * 9.0);
  fill(m.c1_w, static_cast<std::size_t>(m.c1.cout) * m.c1.cin * 9, b1);
  fill(m.c1_b, static_cast<std::size_t>(m.c1.cout), b1);
  fill(m.c2_w, static_cast<std::size_t>(m.c2.cout) * m.c2.cin * 9, b2);
  fill(m.c2_b, static_cast<std::size_t>(m.c2.cout), b2);
  for (std::size_t l = 0; l < m.dense.size(); ++l) {
    const Dense& d = m.dense[l];
    // Small head keeps initial actions near the middle and values near zero.
    const double bound = l + 1 == m.dense.size() ? 3e-3 : 1.0 / std::sqrt(static_cast<double>(d.in));
    fill(d.w_offset, static_cast<std::size_t>(d.in) * d.out, bound);
    fill(d.b_offset, static_cast<std::size_t>(d.out), bound);
  }
  round_to_float(p);
  return p;
}

std::vector<double> Network::forward(const ParamVector& params, const Batch& batch,
                                     std::span<const double> actions, ForwardCache* cache) const {
  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  check_inputs(params, batch, actions);
  ConvTrunk* t = writable_trunk(*c.data);
  run_trunk(params, batch, *t);
  run_head(params, batch, actions, *c.data);
  return {c.data->output.data(), c.data->output.data() + c.data->output.size()};
}

std::vector<double> Network::forward_shared(const ParamVector& params, const Batch& batch,
                                            std::span<const double> actions, const ForwardCache& trunk,
                                            ForwardCache* cache) const {
  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  check_inputs(params, batch, actions);
  if (!trunk.data->trunk || trunk.data->batch != batch.size) throw std::invalid_argument("trunk cache does not match the batch");
  c.data->trunk = trunk.data->trunk;
  run_head(params, batch, actions, *c.data);
  return {c.data->output.data(), c.data->output.data() + c.data->output.size()};
}

void Network::check_inputs(const ParamVector& params, const Batch& batch, std::span<const double> actions) const {
  if (params.size() != impl_->count) throw std::invalid_argument("parameter vector has the wrong size");
  if (batch.size < 1) throw std::invalid_argument("empty batch");
  if (kind_ == NetKind::Critic && actions.size() != static_cast<std::size_t>(NetConfig::kActionDim) * batch.size) {
    throw std::invalid_argument("critic needs one action per sample");
  }
}

ConvTrunk* Network::writable_trunk(ForwardCache::Data& d) {
  if (!d.trunk || d.trunk.use_count() > 1) d.trunk = std::make_shared<ConvTrunk>();
  return d.trunk.get();
}

void Network::run_trunk(const ParamVector& params, const Batch& batch, ConvTrunk& t) const {
  const Impl& m = *impl_;
  const int B = batch.size;
  // Input image into activation layout.
  const int P0 = m.c1.in_positions();
  t.x0.resize(m.c1.cin, static_cast<Eigen::Index>(P0) * B);
  for (int b = 0; b < B; ++b) {
    const double* src = batch.images.data() + static_cast<std::size_t>(b) * config_.image_size();
    for (int c = 0; c < m.c1.cin; ++c) {
      for (int pos = 0; pos < P0; ++pos) t.x0(c, static_cast<Eigen::Index>(b) * P0 + pos) = src[c * P0 + pos];
    }
  }
  const CRowMap w1(params.data() + m.c1_w, m.c1.cout, m.c1.cin * 9);
  const CVecMap b1(params.data() + m.c1_b, m.c1.cout);
  im2col(t.x0, m.c1, m.taps1, B, t.p1);
  t.z1.noalias() = w1 * t.p1;
  t.z1.colwise() += b1;
  require_finite(t.z1, "conv1");
  t.a1 = t.z1.cwiseMax(0.0);

  const CRowMap w2(params.data() + m.c2_w, m.c2.cout, m.c2.cin * 9);
  const CVecMap b2(params.data() + m.c2_b, m.c2.cout);
  im2col(t.a1, m.c2, m.taps2, B, t.p2);
  t.z2.noalias() = w2 * t.p2;
  t.z2.colwise() += b2;
  require_finite(t.z2, "conv2");
}

void Network::run_head(const ParamVector& params, const Batch& batch, std::span<const double> actions,
                       ForwardCache::Data& d) const {
  const Impl& m = *impl_;
  const ConvTrunk& t = *d.trunk;
  const int B = batch.size;
  d.batch = B;
  const int P2 = m.c2.out_positions();
  const int E = config_.extra_dim();
  const std::size_t layers = m.dense.size();
  d.dense_in.resize(layers);
  d.dense_z.resize(layers);
  Mat& x = d.dense_in.front();
  x.resize(m.dense.front().in, B);
  for (int b = 0; b < B; ++b) {
    for (int c = 0; c < m.c2.cout; ++c) {
      for (int pos = 0; pos < P2; ++pos) {
        x(c * P2 + pos, b) = std::max(0.0, t.z2(c, static_cast<Eigen::Index>(b) * P2 + pos));
      }
    }
    for (int e = 0; e < E; ++e) x(m.flat + e, b) = batch.extras[static_cast<std::size_t>(b) * E + e];
    if (kind_ == NetKind::Critic) {
      for (int a = 0; a < NetConfig::kActionDim; ++a) {
        x(m.flat + E + a, b) = actions[static_cast<std::size_t>(b) * NetConfig::kActionDim + a];
      }
    }
  }

  for (std::size_t l = 0; l < layers; ++l) {
    const Dense& layer = m.dense[l];
    const CRowMap w(params.data() + layer.w_offset, layer.out, layer.in);
    const CVecMap bias(params.data() + layer.b_offset, layer.out);
    Mat& z = d.dense_z[l];
    z.noalias() = w * d.dense_in[l];
    z.colwise() += bias;
    const bool last = l + 1 == layers;
    require_finite(z, last ? "head" : "dense" + std::to_string(l + 1));
    if (last) {
      if (kind_ == NetKind::Actor) {
        d.output = (1.0 + (-z.array()).exp()).inverse().matrix();
      } else {
        d.output = z;
      }
    } else {
      d.dense_in[l + 1] = z.cwiseMax(0.0);
    }
  }
}

Gradients Network::backward(const ParamVector& params, const ForwardCache& cache,
                            std::span<const double> upstream) const {
  const Impl& m = *impl_;
  const ForwardCache::Data& d = *cache.data;
  if (!d.trunk) throw std::invalid_argument("backward needs a filled forward cache");
  const ConvTrunk& t = *d.trunk;
  const int B = d.batch;
  if (upstream.size() != static_cast<std::size_t>(output_dim()) * B) {
    throw std::invalid_argument("upstream gradient has the wrong size");
  }
  Gradients g;
  g.params.assign(m.count, 0.0);

  Mat dz = Eigen::Map<const Mat>(upstream.data(), output_dim(), B);
  if (kind_ == NetKind::Actor) dz = dz.cwiseProduct(d.output.cwiseProduct((1.0 - d.output.array()).matrix()));

  Mat dx;
  for (std::size_t l = m.dense.size(); l-- > 0;) {
    const Dense& layer = m.dense[l];
    RowMap(g.params.data() + layer.w_offset, layer.out, layer.in) = dz * d.dense_in[l].transpose();
    VecMap(g.params.data() + layer.b_offset, layer.out) = dz.rowwise().sum();
    const CRowMap w(params.data() + layer.w_offset, layer.out, layer.in);
    dx = w.transpose() * dz;
    if (l > 0) dz = dx.cwiseProduct((d.dense_z[l - 1].array() > 0.0).cast<double>().matrix());
  }

  const int E = config_.extra_dim();
  if (kind_ == NetKind::Critic) {
    g.action.resize(static_cast<std::size_t>(NetConfig::kActionDim) * B);
    for (int b = 0; b < B; ++b) {
      for (int a = 0; a < NetConfig::kActionDim; ++a) {
        g.action[static_cast<std::size_t>(b) * NetConfig::kActionDim + a] = dx(m.flat + E + a, b);
      }
    }
  }

  const int P2 = m.c2.out_positions();
  Mat dz2(m.c2.cout, static_cast<Eigen::Index>(P2) * B);
  for (int b = 0; b < B; ++b) {
    for (int c = 0; c < m.c2.cout; ++c) {
      for (int pos = 0; pos < P2; ++pos) {
        const Eigen::Index col = static_cast<Eigen::Index>(b) * P2 + pos;
        dz2(c, col) = t.z2(c, col) > 0.0 ? dx(c * P2 + pos, b) : 0.0;
      }
    }
  }
  RowMap(g.params.data() + m.c2_w, m.c2.cout, m.c2.cin * 9) = dz2 * t.p2.transpose();
  VecMap(g.params.data() + m.c2_b, m.c2.cout) = dz2.rowwise().sum();
  const CRowMap w2(params.data() + m.c2_w, m.c2.cout, m.c2.cin * 9);
  const Mat da1 = col2im(w2.transpose() * dz2, m.c2, m.taps2, B);
  const Mat dz1 = da1.cwiseProduct((t.z1.array() > 0.0).cast<double>().matrix());
  RowMap(g.params.data() + m.c1_w, m.c1.cout, m.c1.cin * 9) = dz1 * t.p1.transpose();
  VecMap(g.params.data() + m.c1_b, m.c1.cout) = dz1.rowwise().sum();
  return g;
}

CutAction actor_action(const Network& actor, const ParamVector& params, const EncodedState& s) {
  const Batch b = Batch::from(std::span(&s, 1), actor.config());
  const auto out = actor.forward(params, b);
  return CutAction{out[0], out[1], out[2], out[3], out[4]};
}

double critic_value(const Network& critic, const ParamVector& params, const EncodedState& s,
                    const CutAction& action) {
  const Batch b = Batch::from(std::span(&s, 1), critic.config());
  const auto a = action.to_array();
  return critic.forward(params, b, a).front();
}

// ---------------------------------------------------------------------------
// Checkpoints

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

namespace {

constexpr char kMagic[4] = {'S', 'P', 'C', 'K'};

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (in.gcount() != static_cast<std::streamsize>(sizeof(T))) throw std::runtime_error("checkpoint: truncated");
  return v;
}

void put_params(std::ostream& out, const ParamVector& p) {
  put<std::uint64_t>(out, p.size());
  for (double v : p) put<float>(out, static_cast<float>(v));
}

ParamVector get_params(std::istream& in, std::size_t expected) {
  const auto n = get<std::uint64_t>(in);
  if (n != expected) throw std::runtime_error("checkpoint: parameter count does not match its config");
  ParamVector p(static_cast<std::size_t>(n));
  for (double& v : p) {
    v = static_cast<double>(get<float>(in));
    if (!std::isfinite(v)) throw std::runtime_error("checkpoint: non-finite parameter");
  }
  return p;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, std::ostream& out) {
  const NetConfig& c = ckpt.config;
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::int32_t>(out, c.input_rows);
  put<std::int32_t>(out, c.input_cols);
  put<std::int32_t>(out, c.conv1_channels);
  put<std::int32_t>(out, c.conv2_channels);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(c.mlp_widths.size()));
  for (int w : c.mlp_widths) put<std::int32_t>(out, w);
  put<std::int32_t>(out, c.max_corners);
  put<std::int32_t>(out, c.max_steps);
  put<std::uint8_t>(out, c.use_projections ? 1 : 0);
  put<std::uint64_t>(out, c.seed);
  put_params(out, ckpt.actor);
  put_params(out, ckpt.critic);
  if (!out) throw std::runtime_error("checkpoint: write failed");
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  save_checkpoint(ckpt, out);
}

Checkpoint load_checkpoint(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("not a checkpoint file");
  const auto version = get<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ckpt;
  NetConfig& c = ckpt.config;
  c.input_rows = get<std::int32_t>(in);
  c.input_cols = get<std::int32_t>(in);
  c.conv1_channels = get<std::int32_t>(in);
  c.conv2_channels = get<std::int32_t>(in);
  const auto layers = get<std::uint32_t>(in);
  if (layers == 0 || layers > 64) throw std::runtime_error("checkpoint: bad layer count");
  c.mlp_widths.resize(layers);
  for (int& w : c.mlp_widths) w = get<std::int32_t>(in);
  c.max_corners = get<std::int32_t>(in);
  c.max_steps = get<std::int32_t>(in);
  c.use_projections = get<std::uint8_t>(in) != 0;
  c.seed = get<std::uint64_t>(in);
  try {
    check(c);
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("checkpoint: ") + e.what());
  }
  ckpt.actor = get_params(in, Network(c, NetKind::Actor).param_count());
  ckpt.critic = get_params(in, Network(c, NetKind::Critic).param_count());
  return ckpt;
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return load_checkpoint(in);
}

}  // namespace sliceparse
