#include "dct.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace nlheat::detail {
namespace {

// FFTW planning is not thread safe; execution with new arrays is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::span<const int> shape, fftw_r2r_kind kind) {
    Key key{std::vector<int>(shape.begin(), shape.end()), kind};
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::size_t n = 1;
    for (int m : shape) n *= static_cast<std::size_t>(m);
    double* scratch = fftw_alloc_real(n);
    std::vector<fftw_r2r_kind> kinds(shape.size(), kind);
    fftw_plan plan = fftw_plan_r2r(static_cast<int>(shape.size()), shape.data(), scratch, scratch,
                                   kinds.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    plans_.emplace(std::move(key), plan);
    return plan;
  }

 private:
  using Key = std::tuple<std::vector<int>, fftw_r2r_kind>;
  std::mutex mutex_;
  std::map<Key, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void dct2_inplace(std::span<double> data, std::span<const int> shape) {
  fftw_execute_r2r(cache().get(shape, FFTW_REDFT10), data.data(), data.data());
}

void dct3_inplace(std::span<double> data, std::span<const int> shape) {
  fftw_execute_r2r(cache().get(shape, FFTW_REDFT01), data.data(), data.data());
}

}  // namespace nlheat::detail
