#include "csim/util.hpp"

#include <atomic>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace csim {

namespace {

std::vector<int> first_primes(int count) {
  std::vector<int> primes;
  for (int v = 2; static_cast<int>(primes.size()) < count; ++v) {
    bool ok = true;
    for (int p : primes) {
      if (p * p > v) break;
      if (v % p == 0) {
        ok = false;
        break;
      }
    }
    if (ok) primes.push_back(v);
  }
  return primes;
}

double radical_inverse(std::uint64_t i, int base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

}  // namespace

HaltonSampler::HaltonSampler(int dim, std::uint64_t seed) : dim_(dim), index_(seed + 17) {
  if (dim < 1 || dim > 256)
    throw std::invalid_argument("HaltonSampler: unsupported dimension");
}

Vec HaltonSampler::next() {
  static const std::vector<int> primes = first_primes(256);
  Vec p(dim_);
  for (int d = 0; d < dim_; ++d) p[d] = radical_inverse(index_, primes[d]);
  ++index_;
  return p;
}

Vec HaltonSampler::next_in_box(const Vec& lo, const Vec& hi) {
  Vec p = next();
  for (int d = 0; d < dim_; ++d) p[d] = lo[d] + p[d] * (hi[d] - lo[d]);
  return p;
}

int worker_count() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("CSIM_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1 && cap < hw) hw = cap;
  }
  return hw;
}

void parallel_for(int count, const std::function<void(int)>& fn) {
  const int workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace csim
