#include "thz/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace thz {

namespace {

std::mutex plan_mutex;
std::map<std::pair<std::size_t, int>, fftw_plan> plan_cache;

fftw_plan get_plan(std::size_t n, int sign) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto key = std::make_pair(n, sign);
    auto it = plan_cache.find(key);
    if (it != plan_cache.end()) return it->second;
    // Planned UNALIGNED so the plan applies to any caller buffer of this size.
    std::vector<cplx> scratch(n);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    plan_cache.emplace(key, plan);
    return plan;
}

}  // namespace

void fft(std::vector<cplx>& x) {
    if (x.empty()) return;
    auto* buf = reinterpret_cast<fftw_complex*>(x.data());
    fftw_execute_dft(get_plan(x.size(), FFTW_FORWARD), buf, buf);
}

void ifft(std::vector<cplx>& x) {
    if (x.empty()) return;
    auto* buf = reinterpret_cast<fftw_complex*>(x.data());
    fftw_execute_dft(get_plan(x.size(), FFTW_BACKWARD), buf, buf);
    const double scale = 1.0 / static_cast<double>(x.size());
    for (cplx& v : x) v *= scale;
}

}  // namespace thz
