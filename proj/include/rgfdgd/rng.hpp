#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace rgfdgd {

/// What a random stream is used for. Mixed into the stream seed so that
/// two purposes never share draws even for the same agent.
enum class StreamPurpose : std::uint32_t {
  kOracle = 1,
  kInitialState = 2,
  kDataset = 3,
  kMask = 4,
  kMonteCarlo = 5,
  kProbe = 6,
};

/// A single-consumer pseudo-random stream identified by (run seed, purpose,
/// stream id). Two streams with the same identity produce identical draws.
class RngStream {
 public:
  RngStream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t stream_id);

  /// Convenience for tests and one-off sampling.
  explicit RngStream(std::uint64_t seed)
      : RngStream(seed, StreamPurpose::kMonteCarlo, 0) {}

  double normal();
  double uniform(double lo, double hi);
  /// Fills a vector with i.i.d. standard normals.
  Eigen::VectorXd normal_vector(int dim);

  std::uint64_t stream_id() const { return stream_id_; }
  /// Number of draws (scalar normals or uniforms) taken so far.
  std::uint64_t draws() const { return draws_; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uint64_t stream_id_;
  std::uint64_t draws_ = 0;
};

}  // namespace rgfdgd
