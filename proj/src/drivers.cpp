#include "cirsim/drivers.hpp"

#include <algorithm>
#include <cmath>

namespace cirsim {

namespace {

constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

}  // namespace

std::array<std::uint64_t, 4> RandomStream::philox4x64(std::array<std::uint64_t, 4> counter,
                                                      std::array<std::uint64_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, counter[0], hi0, lo0);
    mulhilo(kMul1, counter[2], hi1, lo1);
    counter = {hi1 ^ counter[1] ^ key[0], lo1, hi0 ^ counter[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return counter;
}

void RandomStream::refill() {
  ++block_;  // advance-then-generate, the numpy.random.Philox convention
  buffer_ = philox4x64({block_, 0, substream_, 0}, key_);
  pos_ = 0;
}

std::uint64_t RandomStream::next_u64() {
  if (pos_ == 4) refill();
  return buffer_[pos_++];
}

double RandomStream::uniform01() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
}

double RandomStream::normal() { return normal_inverse_cdf(uniform01()); }

double RandomStream::exponential(double rate) { return -std::log(uniform01()) / rate; }

// Wichura (1988), algorithm AS 241, routine PPND16.
double normal_inverse_cdf(double p) {
  static constexpr double a[8] = {
      3.3871328727963666080e0,  1.3314166789178437745e2, 1.9715909503065514427e3,
      1.3731693765509461125e4,  4.5921953931549871457e4, 6.7265770927008700853e4,
      3.3430575583588128105e4,  2.5090809287301226727e3};
  static constexpr double b[8] = {
      1.0,                      4.2313330701600911252e1, 6.8718700749205790830e2,
      5.3941960214247511077e3,  2.1213794301586595867e4, 3.9307895800092710610e4,
      2.8729085735721942674e4,  5.2264952788528545610e3};
  static constexpr double c[8] = {
      1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
      3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
      2.27238449892691845833e-2, 7.74545014278341407640e-4};
  static constexpr double d[8] = {
      1.0,                      2.05319162663775882187e0, 1.67638483018380384940e0,
      6.89767334985100004550e-1, 1.48103976427480074590e-1, 1.51986665636164571966e-2,
      5.47593808499534494600e-4, 1.05075007164441684324e-9};
  static constexpr double e[8] = {
      6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
      2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
      2.71155556874348757815e-5, 2.01033439929228813265e-7};
  static constexpr double f[8] = {
      1.0,                      5.99832206555887937690e-1, 1.36929880922735805310e-1,
      1.48753612908506148525e-2, 7.86869131145613259100e-4, 1.84631831751005468180e-5,
      1.42151175831644588870e-7, 2.04426310338993978564e-15};

  auto poly = [](const double (&k)[8], double x) {
    double s = k[7];
    for (int i = 6; i >= 0; --i) s = s * x + k[i];
    return s;
  };

  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * poly(a, r) / poly(b, r);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double z;
  if (r <= 5.0) {
    r -= 1.6;
    z = poly(c, r) / poly(d, r);
  } else {
    r -= 5.0;
    z = poly(e, r) / poly(f, r);
  }
  return q < 0.0 ? -z : z;
}

double gaussian_increment(RandomStream& rng, double dt) {
  if (!(dt > 0.0)) throw NonpositiveStep(dt);
  return std::sqrt(dt) * rng.normal();
}

std::optional<double> next_jump_time(RandomStream& rng, double rate, double after) {
  if (rate < 0.0) throw Error("jump rate must be >= 0");
  if (rate == 0.0) return std::nullopt;
  return after + rng.exponential(rate);
}

MarkSample sample_mark(const JumpMeasure& m, RandomStream& rng) {
  if (m.is_no_jumps()) throw SamplingFromEmptyMeasure();
  if (m.size() == 1) return {m.atom(0).u, 0};
  const std::vector<double>& cum = m.cumulative_weights();
  const double x = rng.uniform01() * m.total_mass();
  const std::size_t i = static_cast<std::size_t>(
      std::upper_bound(cum.begin(), cum.end(), x) - cum.begin());
  const std::size_t idx = std::min(i, m.size() - 1);
  return {m.atom(idx).u, idx};
}

std::vector<JumpEvent> jump_events_in(RandomStream& rng, const JumpMeasure& m,
                                      double t0, double t1) {
  if (!(t0 < t1)) throw Error("jump_events_in requires t0 < t1");
  std::vector<JumpEvent> events;
  if (m.is_no_jumps()) return events;
  const double rate = m.total_mass();
  double t = t0 + rng.exponential(rate);
  while (t <= t1) {
    const MarkSample s = sample_mark(m, rng);
    events.push_back({t, s.u, s.index});
    t += rng.exponential(rate);
  }
  return events;
}

}  // namespace cirsim
