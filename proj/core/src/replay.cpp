#include "sliceparse/replay.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace sliceparse {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

Transition stored(Transition t) {
  t.state.remaining.reset();
  t.next_state.remaining.reset();
  return t;
}

ReplayBuffer::ReplayBuffer(BufferKind kind, std::size_t capacity) : kind_(kind), capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay buffer capacity must be positive");
}

bool ReplayBuffer::add(Transition t) {
  if (kind_ == BufferKind::Demo && !t.expert_action) {
    throw std::invalid_argument("demonstration transitions need an expert action");
  }
  t = stored(std::move(t));
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
  } else if (kind_ == BufferKind::Agent) {
    items_[next_] = std::move(t);
    next_ = (next_ + 1) % capacity_;
  } else {
    return false;
  }
  ++inserted_;
  return true;
}

std::vector<std::size_t> ReplayBuffer::sample(std::size_t n, std::mt19937_64& rng) const {
  if (items_.empty()) throw std::logic_error("sampling an empty replay buffer");
  std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
  std::vector<std::size_t> out(n);
  for (auto& i : out) i = pick(rng);
  return out;
}

bool ReplayBuffer::refresh(int shape_id, double episode_return, std::span<const Transition> episode) {
  if (kind_ != BufferKind::Demo) throw std::logic_error("only demo buffers are refreshed");
  auto of_shape = [&](const Transition& t) { return t.shape_id == shape_id; };
  const auto first = std::find_if(items_.begin(), items_.end(), of_shape);
  if (first == items_.end() || !(episode_return > first->episode_return)) return false;
  if (std::any_of(episode.begin(), episode.end(), [](const Transition& t) { return !t.expert_action; })) {
    throw std::invalid_argument("refresh transitions need expert actions");
  }
  if (episode.empty()) return false;
  // Overwrite the shape's slots in place, cycling through the episode, so the
  // buffer keeps its per-shape share.
  std::size_t next = 0;
  for (auto& slot : items_) {
    if (!of_shape(slot)) continue;
    slot = stored(episode[next]);
    slot.shape_id = shape_id;
    slot.episode_return = episode_return;
    next = (next + 1) % episode.size();
    ++inserted_;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

constexpr char kMagic[4] = {'S', 'P', 'T', 'R'};

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  template <typename T>
  void pod(T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void bytes(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}
  template <typename T>
  T pod() {
    T v;
    bytes(&v, sizeof(T));
    return v;
  }
  void bytes(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw std::runtime_error("transition store: truncated");
  }

 private:
  std::istream& in_;
};

void write_action(Writer& w, const CutAction& a) {
  for (double v : a.to_array()) w.pod(v);
}

CutAction read_action(Reader& r) {
  std::array<double, 5> a{};
  for (auto& v : a) v = r.pod<double>();
  return CutAction::from_array(a);
}

void write_state(Writer& w, const ParseState& s) {
  w.pod<std::int32_t>(s.step_index);
  for (std::size_t v = 0; v < 3; ++v) {
    const Mask& m = s.projections[v].pixels;
    w.pod<std::uint8_t>(static_cast<std::uint8_t>(s.projections[v].view));
    w.pod<std::uint32_t>(static_cast<std::uint32_t>(m.rows()));
    w.pod<std::uint32_t>(static_cast<std::uint32_t>(m.cols()));
    w.bytes(m.data().data(), m.size());
    w.pod<std::uint32_t>(static_cast<std::uint32_t>(s.corner_lists[v].size()));
    for (const auto& p : s.corner_lists[v]) {
      w.pod(p.x);
      w.pod(p.y);
    }
    const auto& cs = s.corners[v];
    w.pod<std::uint8_t>(static_cast<std::uint8_t>(cs.view));
    w.pod<std::uint32_t>(static_cast<std::uint32_t>(cs.points.size()));
    for (const auto& c : cs.points) {
      w.pod<std::int32_t>(c.row);
      w.pod<std::int32_t>(c.col);
      w.pod(c.response);
    }
  }
}

View read_view(Reader& r) {
  const auto v = r.pod<std::uint8_t>();
  if (v > 2) throw std::runtime_error("transition store: bad view id");
  return static_cast<View>(v);
}

ParseState read_state(Reader& r) {
  constexpr std::uint32_t kMaxSide = 1u << 14;
  ParseState s;
  s.step_index = r.pod<std::int32_t>();
  for (std::size_t v = 0; v < 3; ++v) {
    s.projections[v].view = read_view(r);
    const auto rows = r.pod<std::uint32_t>();
    const auto cols = r.pod<std::uint32_t>();
    if (rows > kMaxSide || cols > kMaxSide) throw std::runtime_error("transition store: bad image size");
    Mask m(static_cast<int>(rows), static_cast<int>(cols));
    r.bytes(m.data().data(), m.size());
    s.projections[v].pixels = std::move(m);
    const auto n = r.pod<std::uint32_t>();
    if (n > kMaxSide) throw std::runtime_error("transition store: bad corner count");
    s.corner_lists[v].resize(n);
    for (auto& p : s.corner_lists[v]) {
      p.x = r.pod<double>();
      p.y = r.pod<double>();
    }
    s.corners[v].view = read_view(r);
    const auto nc = r.pod<std::uint32_t>();
    if (nc > kMaxSide) throw std::runtime_error("transition store: bad corner count");
    s.corners[v].points.resize(nc);
    for (auto& c : s.corners[v].points) {
      c.row = r.pod<std::int32_t>();
      c.col = r.pod<std::int32_t>();
      c.response = r.pod<double>();
    }
  }
  return s;
}

}  // namespace

void save_transitions(std::ostream& out, BufferKind kind, std::size_t capacity,
                      std::span<const Transition> items) {
  Writer w(out);
  w.bytes(kMagic, 4);
  w.pod<std::uint32_t>(kTransitionFormatVersion);
  w.pod<std::uint8_t>(static_cast<std::uint8_t>(kind));
  w.pod<std::uint64_t>(capacity);
  w.pod<std::uint64_t>(items.size());
  for (const auto& t : items) {
    write_state(w, t.state);
    write_action(w, t.action);
    w.pod(t.reward);
    write_state(w, t.next_state);
    w.pod<std::uint8_t>(t.done ? 1 : 0);
    w.pod<std::uint8_t>(t.expert_action ? 1 : 0);
    if (t.expert_action) write_action(w, *t.expert_action);
    w.pod<std::int32_t>(t.shape_id);
    w.pod(t.episode_return);
  }
  if (!out) throw std::runtime_error("transition store: write failed");
}

void save_buffer(const ReplayBuffer& buffer, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  save_transitions(out, buffer.kind(), buffer.capacity(), buffer.items());
}

ReplayBuffer load_buffer(std::istream& in) {
  Reader r(in);
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("not a transition store");
  const auto version = r.pod<std::uint32_t>();
  if (version != kTransitionFormatVersion) {
    throw std::runtime_error("unsupported transition store version " + std::to_string(version));
  }
  const auto kind = r.pod<std::uint8_t>();
  if (kind > 1) throw std::runtime_error("transition store: bad buffer kind");
  const auto capacity = r.pod<std::uint64_t>();
  const auto count = r.pod<std::uint64_t>();
  if (count > capacity) throw std::runtime_error("transition store: more records than capacity");
  ReplayBuffer buffer(static_cast<BufferKind>(kind), static_cast<std::size_t>(capacity));
  for (std::uint64_t n = 0; n < count; ++n) {
    Transition t;
    t.state = read_state(r);
    t.action = read_action(r);
    t.reward = r.pod<double>();
    t.next_state = read_state(r);
    t.done = r.pod<std::uint8_t>() != 0;
    if (r.pod<std::uint8_t>() != 0) t.expert_action = read_action(r);
    t.shape_id = r.pod<std::int32_t>();
    t.episode_return = r.pod<double>();
    buffer.add(std::move(t));
  }
  return buffer;
}

ReplayBuffer load_buffer(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return load_buffer(in);
}

}  // namespace sliceparse
