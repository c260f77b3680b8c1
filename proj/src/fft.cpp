#include "landau/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace landau::fft {
namespace {

struct PlanCache {
    std::mutex mu;
    std::map<std::pair<int, int>, fftw_plan> plans;

    ~PlanCache() {
        for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
    }

    fftw_plan get(int n, int sign) {
        std::lock_guard<std::mutex> lock(mu);
        auto it = plans.find({n, sign});
        if (it != plans.end()) return it->second;
        // FFTW_ESTIMATE never touches the arrays and gives the same plan on
        // every run, which keeps the transforms bit-reproducible.
        std::vector<fftw_complex> a(n), b(n);
        fftw_plan p = fftw_plan_dft_1d(n, a.data(), b.data(), sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!p) throw std::runtime_error("fftw: plan creation failed");
        plans.emplace(std::make_pair(n, sign), p);
        return p;
    }
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

}  // namespace

void transform(const cplx* in, cplx* out, int n, int sign) {
    fftw_plan p = cache().get(n, sign);
    // new-array execute: the input is not modified by out-of-place c2c plans
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

}  // namespace landau::fft
