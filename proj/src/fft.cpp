#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace cohomlab::detail {
namespace {

using PlanKey = std::tuple<std::vector<std::size_t>, std::size_t, int>;

struct PlanCache {
  std::mutex mutex;
  std::map<PlanKey, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

fftw_plan plan_for(std::span<std::complex<double>> data, std::span<const std::size_t> shape,
                   std::size_t axis, int sign) {
  PlanKey key{std::vector<std::size_t>(shape.begin(), shape.end()), axis, sign};
  auto& c = cache();
  std::lock_guard lock(c.mutex);
  if (auto it = c.plans.find(key); it != c.plans.end()) return it->second;

  std::size_t inner = 1;
  for (std::size_t a = axis + 1; a < shape.size(); ++a) inner *= shape[a];
  std::size_t outer = 1;
  for (std::size_t a = 0; a < axis; ++a) outer *= shape[a];
  const auto n = shape[axis];

  fftw_iodim dim{static_cast<int>(n), static_cast<int>(inner), static_cast<int>(inner)};
  fftw_iodim loops[2] = {
      {static_cast<int>(outer), static_cast<int>(n * inner), static_cast<int>(n * inner)},
      {static_cast<int>(inner), 1, 1},
  };
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  // FFTW_ESTIMATE never touches the array, so planning on live data is fine.
  fftw_plan plan = fftw_plan_guru_dft(1, &dim, 2, loops, p, p,
                                      sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (plan == nullptr) throw std::runtime_error("fftw: planning failed");
  c.plans.emplace(std::move(key), plan);
  return plan;
}

}  // namespace

void dft_axis(std::span<std::complex<double>> data, std::span<const std::size_t> shape,
              std::size_t axis, int sign) {
  if (data.empty()) return;
  fftw_plan plan = plan_for(data, shape, axis, sign);
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, p, p);
}

}  // namespace cohomlab::detail
