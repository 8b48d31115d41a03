#include "qcl/common.hpp"

#include <atomic>
#include <cstdlib>
#include <mutex>
#include <thread>

namespace qcl {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NotHermitian: return "NotHermitian";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NotUnitary: return "NotUnitary";
    case Errc::NotSchur: return "NotSchur";
    case Errc::BadDecomposition: return "BadDecomposition";
    case Errc::NotGeneralizedSchur: return "NotGeneralizedSchur";
    case Errc::HypothesisFails: return "HypothesisFails";
    case Errc::NotContractive: return "NotContractive";
    case Errc::SingularResolvent: return "SingularResolvent";
    case Errc::NotAState: return "NotAState";
    case Errc::MixedStates: return "MixedStates";
    case Errc::LambdaSumNonzero: return "LambdaSumNonzero";
    case Errc::NotCanonical: return "NotCanonical";
    case Errc::NotCommuting: return "NotCommuting";
    case Errc::QuadratureDivergent: return "QuadratureDivergent";
    case Errc::Inconclusive: return "Inconclusive";
    case Errc::SchemaError: return "SchemaError";
  }
  return "UnknownError";
}

std::size_t worker_count() {
  if (const char* env = std::getenv("QCL_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<std::size_t>(v);
  }
  std::size_t hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void parallel_for_index(std::size_t n, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  std::size_t workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex err_mutex;
  auto body = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace qcl
