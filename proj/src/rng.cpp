#include "rgfdgd/rng.hpp"

namespace rgfdgd {

RngStream::RngStream(std::uint64_t seed, StreamPurpose purpose,
                     std::uint64_t stream_id)
    : stream_id_(stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(purpose),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32)};
  engine_.seed(seq);
}

double RngStream::normal() {
  ++draws_;
  return normal_(engine_);
}

double RngStream::uniform(double lo, double hi) {
  ++draws_;
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

Eigen::VectorXd RngStream::normal_vector(int dim) {
  Eigen::VectorXd v(dim);
  for (int j = 0; j < dim; ++j) v[j] = normal();
  return v;
}

}  // namespace rgfdgd
