#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <random>
#include <stdexcept>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

namespace crplab {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t hash_label(std::string_view label);

// Stream for replicate `index` of an experiment tagged `label`.
Rng make_stream(std::uint64_t seed, std::uint64_t label, std::uint64_t index);
inline Rng make_stream(std::uint64_t seed, std::string_view label, std::uint64_t index) {
  return make_stream(seed, hash_label(label), index);
}

double uniform01(Rng& rng);           // in [0,1)
double uniform_open(Rng& rng);        // in (0,1)
double exponential(Rng& rng, double rate);

// CRPLAB_WORKERS overrides; defaults to hardware concurrency.
unsigned worker_count();

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Runs f(index, rng) for index in [0, reps) across worker threads. Results are
// stored by index so the output does not depend on the number of workers.
template <class F>
auto run_replicates(std::size_t reps, std::uint64_t seed, std::string_view label, F f)
    -> std::vector<decltype(f(std::size_t{}, std::declval<Rng&>()))> {
  using R = decltype(f(std::size_t{}, std::declval<Rng&>()));
  std::vector<R> out(reps);
  const std::uint64_t tag = hash_label(label);
  unsigned workers = worker_count();
  if (workers > reps) workers = static_cast<unsigned>(reps == 0 ? 1 : reps);
  auto body = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < reps; i += step) {
      Rng rng = make_stream(seed, tag, i);
      out[i] = f(i, rng);
    }
  };
  if (workers <= 1) {
    body(0, 1);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        body(w, workers);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace crplab
