#include <cstring>

#include "threshcal/calibrator.hpp"

// Snapshot container, byte-packed little-endian (see docs/snapshot-format.md):
//   magic[8] "TCALSNAP", version u32, mode u8, alpha f64, q0 f64, q1 f64,
//   tie_tol f64, observations u64, record count u64,
//   records (x f64, z f64, offset f64, n0 u64, n1 u64),
//   FNV-1a 64 checksum of everything before it.

namespace threshcal {

namespace {

constexpr char kMagic[8] = {'T', 'C', 'A', 'L', 'S', 'N', 'A', 'P'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderSize = 8 + 4 + 1 + 8 + 8 + 8 + 8 + 8 + 8;
constexpr std::size_t kRecordSize = 8 + 8 + 8 + 8 + 8;

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (std::uint8_t b : bytes) {
    hash ^= b;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

void put_u8(std::vector<std::uint8_t>& out, std::uint8_t v) { out.push_back(v); }

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  put_u64(out, bits);
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }
  double f64() {
    const std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }

 private:
  void need(std::size_t n) {
    if (pos_ + n > bytes_.size()) throw SnapshotError("snapshot truncated");
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> Calibrator::snapshot() const {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + kRecordSize * leaves_.size() + 8);
  for (char c : kMagic) out.push_back(static_cast<std::uint8_t>(c));
  put_u32(out, kVersion);
  put_u8(out, static_cast<std::uint8_t>(spec_.mode));
  put_f64(out, spec_.alpha);
  put_f64(out, bounds_.q0);
  put_f64(out, bounds_.q1);
  put_f64(out, tree_.tie_tol());
  put_u64(out, n_obs_);
  put_u64(out, leaves_.size());
  for (const auto& [x, st] : leaves_) {
    put_f64(out, x);
    put_f64(out, st.z);
    put_f64(out, st.offset);
    put_u64(out, st.n0);
    put_u64(out, st.n1);
  }
  put_u64(out, fnv1a64(out));
  return out;
}

Calibrator Calibrator::restore(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize + 8) throw SnapshotError("snapshot truncated");
  if (std::memcmp(bytes.data(), kMagic, 8) != 0) throw SnapshotError("bad snapshot magic");

  Reader checksum_reader(bytes.subspan(bytes.size() - 8));
  const std::uint64_t stored = checksum_reader.u64();
  if (stored != fnv1a64(bytes.first(bytes.size() - 8)))
    throw SnapshotError("snapshot checksum mismatch");

  Reader r(bytes.first(bytes.size() - 8));
  for (int i = 0; i < 8; ++i) r.u8();  // magic, verified above
  const std::uint32_t version = r.u32();
  if (version != kVersion)
    throw SnapshotError("unsupported snapshot version " + std::to_string(version));

  const std::uint8_t mode_byte = r.u8();
  if (mode_byte > static_cast<std::uint8_t>(LossMode::kRaw))
    throw SnapshotError("invalid loss mode in snapshot");
  const LossMode mode = static_cast<LossMode>(mode_byte);
  const Real alpha = r.f64();
  const Real q0 = r.f64();
  const Real q1 = r.f64();
  const Real tie_tol = r.f64();
  const std::uint64_t n_obs = r.u64();
  const std::uint64_t count = r.u64();

  if (bytes.size() != kHeaderSize + kRecordSize * count + 8)
    throw SnapshotError("snapshot length does not match its record count");

  Calibrator cal = [&] {
    try {
      return Calibrator(LossSpec(mode, alpha), MappingBounds(q0, q1), tie_tol);
    } catch (const std::invalid_argument& e) {
      throw SnapshotError(std::string("invalid snapshot parameters: ") + e.what());
    }
  }();

  std::vector<Sample> samples;
  samples.reserve(count);
  std::uint64_t labeled = 0;
  for (std::uint64_t i = 0; i < count; ++i) {
    const Real x = r.f64();
    const Real z = r.f64();
    LeafStat st;
    st.z = z;
    st.offset = r.f64();
    st.n0 = r.u64();
    st.n1 = r.u64();
    if (!std::isfinite(x) || !std::isfinite(z) || !std::isfinite(st.offset))
      throw SnapshotError("non-finite value in snapshot record");
    if (!samples.empty() && !(samples.back().x < x))
      throw SnapshotError("snapshot records out of order");
    samples.emplace_back(x, z);
    labeled += st.n0 + st.n1;
    cal.leaves_.emplace(x, st);
    cal.offset_total_ += st.offset;
  }
  if (count > 0 && n_obs < count)
    throw SnapshotError("snapshot observation count below record count");
  if (mode != LossMode::kRaw && labeled != n_obs)
    throw SnapshotError("snapshot label counts do not match observations");

  cal.n_obs_ = static_cast<std::size_t>(n_obs);
  if (!samples.empty())
    cal.tree_ = batch_build(SortedInstance(std::move(samples), cal.bounds_), tie_tol);
  return cal;
}

}  // namespace threshcal
