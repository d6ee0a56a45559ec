#include "psq/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <queue>
#include <random>
#include <thread>

#include "psq/errors.hpp"

namespace psq {

namespace {

constexpr long kMinWindowSamples = 200;
constexpr int kGridPoints = 31;

// SplitMix64 finalizer; decorrelates the per-replication seeds.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

 private:
  std::mt19937_64 engine_;
};

struct Job {
  double finish;  // attained-service level at which the job leaves
  long tag;       // index into the tag table, or -1
};

struct LaterFinish {
  bool operator()(const Job& a, const Job& b) const { return a.finish > b.finish; }
};

struct PendingTag {
  double arrival = 0.0;
  double requirement = 0.0;
  int n_seen = 0;
  double sojourn = -1.0;
};

// One replication. Processor sharing is tracked through the attained
// service V(t) common to every job in the system (dV/dt = 1/m); a job
// arriving at level V with requirement x leaves when V reaches V + x.
std::vector<SojournSample> run_replication(const SimConfig& config, int replication) {
  const double rho = config.params.rho();
  const int capacity = config.params.capacity();
  const double warmup = config.effective_warmup();
  Stream rng(mix64(config.seed ^ mix64(static_cast<std::uint64_t>(replication) + 1)));

  std::priority_queue<Job, std::vector<Job>, LaterFinish> jobs;
  std::vector<PendingTag> tags;
  tags.reserve(static_cast<std::size_t>(config.tagged_per_replication));
  long open_tags = 0;

  double now = 0.0;
  double attained = 0.0;
  double next_arrival = rng.exponential(rho);

  auto done = [&] { return static_cast<long>(tags.size()) >= config.tagged_per_replication && open_tags == 0; };

  while (!done()) {
    const int m = static_cast<int>(jobs.size());
    const double next_departure = m > 0 ? now + (jobs.top().finish - attained) * m : INFINITY;
    if (next_arrival <= next_departure) {
      // An empty system restarts the attained-service clock to keep it small.
      attained = m > 0 ? attained + (next_arrival - now) / m : 0.0;
      now = next_arrival;
      next_arrival = now + rng.exponential(rho);
      if (m >= capacity) continue;  // blocked
      const double requirement = rng.exponential(1.0);
      long tag = -1;
      if (now >= warmup && static_cast<long>(tags.size()) < config.tagged_per_replication &&
          rng.uniform() < config.tag_probability) {
        tag = static_cast<long>(tags.size());
        tags.push_back({now, requirement, m, -1.0});
        ++open_tags;
      }
      jobs.push({attained + requirement, tag});
    } else {
      const Job leaving = jobs.top();
      jobs.pop();
      now = next_departure;
      attained = leaving.finish;
      if (leaving.tag >= 0) {
        PendingTag& t = tags[static_cast<std::size_t>(leaving.tag)];
        t.sojourn = now - t.arrival;
        --open_tags;
      }
    }
  }

  std::vector<SojournSample> out;
  out.reserve(tags.size());
  for (const auto& t : tags) {
    // Service rate never exceeds 1, so no sojourn can undercut its requirement
    // beyond the rounding of the absolute clock.
    const double slack = 1e-9 * t.requirement + 64.0 * std::numeric_limits<double>::epsilon() * (t.arrival + t.sojourn);
    if (t.sojourn < t.requirement - slack) throw NumericalError("simulated sojourn shorter than its requirement");
    out.push_back({t.sojourn, t.requirement, t.n_seen, replication});
  }
  return out;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

// Slope of -log survival at the grid points, from per-bin counts: bin 0 holds
// sojourns <= grid[0], bin i holds (grid[i-1], grid[i]], the last bin the rest.
double slope_from_counts(const std::vector<double>& grid, const std::vector<long>& counts, long total) {
  std::vector<double> y(grid.size());
  long above = total;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    above -= counts[i];
    if (above <= 0) return NAN;
    y[i] = -std::log(static_cast<double>(above) / total);
  }
  return least_squares_slope(grid, y);
}

}  // namespace

double SimConfig::effective_warmup() const {
  if (warmup_time >= 0.0) return warmup_time;
  return 50.0 * params.capacity() / std::min(params.rho(), 1.0);
}

std::vector<SojournSample> simulate_sojourns(const SimConfig& config, int threads) {
  if (config.replications < 1) throw DomainError("replications must be at least 1");
  if (config.tagged_per_replication < 1) throw DomainError("tagged_per_replication must be at least 1");
  if (!(config.tag_probability > 0.0 && config.tag_probability <= 1.0)) throw DomainError("tag probability must lie in (0, 1]");

  const int reps = config.replications;
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, reps);

  std::vector<std::vector<SojournSample>> per_rep(reps);
  std::vector<std::exception_ptr> errors(reps);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next++; r < reps; r = next++) {
      try {
        per_rep[r] = run_replication(config, r);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<SojournSample> out;
  out.reserve(static_cast<std::size_t>(reps) * static_cast<std::size_t>(config.tagged_per_replication));
  for (auto& v : per_rep) out.insert(out.end(), v.begin(), v.end());
  return out;
}

TailRateEstimate empirical_tail_rate(std::span<const SojournSample> samples, double t_lo, double t_hi,
                                     std::uint64_t bootstrap_seed, int bootstrap_rounds) {
  if (!(t_lo >= 0.0 && t_hi > t_lo)) throw DomainError("tail window must satisfy 0 <= t_lo < t_hi");
  if (bootstrap_rounds < 2) throw DomainError("need at least two bootstrap rounds");

  std::vector<double> grid(kGridPoints);
  for (int i = 0; i < kGridPoints; ++i) grid[i] = t_lo + (t_hi - t_lo) * i / (kGridPoints - 1);

  const long total = static_cast<long>(samples.size());
  std::vector<long> counts(grid.size() + 1, 0);
  long in_window = 0;
  for (const auto& s : samples) {
    const auto bin = std::lower_bound(grid.begin(), grid.end(), s.sojourn) - grid.begin();
    ++counts[static_cast<std::size_t>(bin)];
    if (s.sojourn > t_lo && s.sojourn <= t_hi) ++in_window;
  }
  if (in_window < kMinWindowSamples)
    throw InsufficientDataError("only " + std::to_string(in_window) + " sojourns fall in the tail window (need " +
                                std::to_string(kMinWindowSamples) + ")");

  TailRateEstimate est;
  est.samples_in_window = in_window;
  est.rate = slope_from_counts(grid, counts, total);
  if (!std::isfinite(est.rate)) throw InsufficientDataError("no sojourns survive past the end of the tail window");

  // Multinomial resampling of the bin counts, drawn as successive binomials.
  std::mt19937_64 engine(mix64(bootstrap_seed + 1));
  std::vector<double> replicates;
  replicates.reserve(static_cast<std::size_t>(bootstrap_rounds));
  std::vector<long> draw(counts.size());
  for (int b = 0; b < bootstrap_rounds; ++b) {
    long left = total;
    long mass = total;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (i + 1 == counts.size() || left == 0) {
        draw[i] = left;
        left = 0;
        continue;
      }
      std::binomial_distribution<long> bin(left, static_cast<double>(counts[i]) / mass);
      draw[i] = bin(engine);
      left -= draw[i];
      mass -= counts[i];
    }
    const double slope = slope_from_counts(grid, draw, total);
    if (std::isfinite(slope)) replicates.push_back(slope);
  }
  if (replicates.size() < 2) throw InsufficientDataError("bootstrap produced too few finite slopes");
  double mean = 0.0;
  for (double v : replicates) mean += v;
  mean /= static_cast<double>(replicates.size());
  double var = 0.0;
  for (double v : replicates) var += (v - mean) * (v - mean);
  est.std_error = std::sqrt(var / static_cast<double>(replicates.size() - 1));
  return est;
}

void write_samples_csv(std::ostream& out, std::span<const SojournSample> samples) {
  const auto old = out.precision(17);
  out << "replication,n_seen,sojourn\n";
  for (const auto& s : samples) out << s.replication << ',' << s.n_seen << ',' << s.sojourn << '\n';
  out.precision(old);
}

}  // namespace psq
