#pragma once

// Thin wrapper over FFTW's complex DFT. Plans are created once per shape and
// direction, always with FFTW_ESTIMATE so planning is deterministic, and then
// executed through the new-array interface, which FFTW guarantees to be
// thread safe.

#include "qcov/core.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace qcov::detail {

enum class Direction : int { forward = FFTW_FORWARD, backward = FFTW_BACKWARD };

class PlanCache {
public:
    static fftw_plan get(const std::vector<int>& dims, Direction dir) {
        static PlanCache cache;
        return cache.lookup(dims, dir);
    }

    PlanCache(const PlanCache&) = delete;
    PlanCache& operator=(const PlanCache&) = delete;

private:
    PlanCache() = default;
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan lookup(const std::vector<int>& dims, Direction dir) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_pair(dims, static_cast<int>(dir));
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;

        std::size_t total = 1;
        for (int d : dims) total *= static_cast<std::size_t>(d);
        auto* buffer = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * total));
        fftw_plan plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buffer,
                                       buffer, static_cast<int>(dir),
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(buffer);
        if (plan == nullptr) throw internal_error("FFTW failed to create a plan");
        plans_.emplace(std::move(key), plan);
        return plan;
    }

    std::mutex mutex_;
    std::map<std::pair<std::vector<int>, int>, fftw_plan> plans_;
};

/// Unnormalized in-place DFT, X_r = sum_j x_j exp(-+ 2 pi i j.r / N).
inline void dft_inplace(cplx* data, const std::vector<int>& dims, Direction dir) {
    fftw_plan plan = PlanCache::get(dims, dir);
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plan, p, p);
}

inline void dft_inplace(std::vector<cplx>& data, const std::vector<int>& dims, Direction dir) {
    dft_inplace(data.data(), dims, dir);
}

}  // namespace qcov::detail
