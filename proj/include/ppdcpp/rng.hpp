#pragma once

#include <cstdint>

namespace ppdcpp {

// Counter-based pseudo-random stream. A stream is fully identified by
// (seed, stream_id): equal identities reproduce equal draw sequences,
// independent of construction order or thread schedule. Substreams are
// derived by hashing, so parallel workers can each own a stream without
// coordinating.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Child stream with an identity derived from (this stream, child).
  RngStream substream(std::uint64_t child) const;

  std::uint64_t next_u64();
  double next_double();  // uniform on (0,1), never exactly 0 or 1

  double next_normal();  // standard normal via inverse CDF
  double next_normal(double mean, double sd);
  double next_gamma(double shape, double scale);
  double next_inverse_gamma(double shape, double rate);
  double next_chisq(double df);
  double next_student_t(double df);
  long next_poisson(double mean);

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  std::uint64_t state_ = 0;  // counter, advanced per draw
};

}  // namespace ppdcpp
