#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "psq/spectral.hpp"

namespace psq {

struct SimConfig {
  QueueParams params;
  int replications = 1;
  // Negative selects the default 50 K / min(rho, 1).
  double warmup_time = -1.0;
  std::uint64_t seed = 0;
  // Tagged sojourns recorded per replication.
  long tagged_per_replication = 10000;
  // Each admitted arrival after warmup is tagged independently with this probability.
  double tag_probability = 0.1;

  double effective_warmup() const;
};

struct SojournSample {
  double sojourn = 0.0;
  double requirement = 0.0;
  int n_seen = 0;
  int replication = 0;
};

// Event-driven M/M/1/K-PS simulation. Samples are ordered by replication
// and, within a replication, by tagged arrival time. Bit-for-bit
// reproducible for a given config, independent of the thread count.
std::vector<SojournSample> simulate_sojourns(const SimConfig& config, int threads = 0);

struct TailRateEstimate {
  double rate = 0.0;
  double std_error = 0.0;
  long samples_in_window = 0;
};

// Least-squares slope of -log(empirical survival) on [t_lo, t_hi] with a
// bootstrap standard error. Throws InsufficientDataError when fewer than
// 200 sojourns fall in the window.
TailRateEstimate empirical_tail_rate(std::span<const SojournSample> samples, double t_lo, double t_hi,
                                     std::uint64_t bootstrap_seed = 1, int bootstrap_rounds = 200);

// Columns replication,n_seen,sojourn.
void write_samples_csv(std::ostream& out, std::span<const SojournSample> samples);

}  // namespace psq
