// SPDX-License-Identifier: Apache-2.0
//
// mgmsim: link-level simulator for mode-group multiplexed IM-DD transmission
// Copyright (C) 2026 The mgmsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "mgmsim/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace mgmsim
{
    namespace
    {
        class PlanCache
        {
        public:
            ~PlanCache()
            {
                for (auto &[key, plan] : plans_)
                    fftw_destroy_plan(plan);
            }

            fftw_plan get(std::size_t n, int sign)
            {
                std::lock_guard<std::mutex> lock(mutex_);
                auto key = std::make_pair(n, sign);
                auto it = plans_.find(key);
                if (it != plans_.end())
                    return it->second;
                // FFTW_ESTIMATE does not touch the buffer while planning.
                fftw_complex *buf = fftw_alloc_complex(n);
                fftw_plan p = fftw_plan_dft_1d(int(n), buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
                fftw_free(buf);
                plans_.emplace(key, p);
                return p;
            }

        private:
            std::mutex mutex_;
            std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
        };

        PlanCache &plan_cache()
        {
            static PlanCache cache;
            return cache;
        }

        void transform(std::span<cplx> x, int sign)
        {
            if (x.empty())
                return;
            fftw_plan p = plan_cache().get(x.size(), sign);
            auto *data = reinterpret_cast<fftw_complex *>(x.data());
            fftw_execute_dft(p, data, data);
            const double s = 1.0 / std::sqrt(double(x.size()));
            for (auto &v : x)
                v *= s;
        }
    }

    void fft_inplace(std::span<cplx> x) { transform(x, FFTW_FORWARD); }
    void ifft_inplace(std::span<cplx> x) { transform(x, FFTW_BACKWARD); }

    std::vector<cplx> fft(std::span<const cplx> x)
    {
        std::vector<cplx> y(x.begin(), x.end());
        fft_inplace(y);
        return y;
    }

    std::vector<cplx> ifft(std::span<const cplx> x)
    {
        std::vector<cplx> y(x.begin(), x.end());
        ifft_inplace(y);
        return y;
    }

    std::size_t fast_fft_size(std::size_t n)
    {
        if (n <= 1)
            return 1;
        for (std::size_t m = n;; ++m)
        {
            std::size_t r = m;
            for (std::size_t f : {2u, 3u, 5u})
                while (r % f == 0)
                    r /= f;
            if (r == 1)
                return m;
        }
    }

    void delay_inplace(std::span<cplx> x, double delay)
    {
        if (delay == 0.0 || x.empty())
            return;
        const std::size_t n = x.size();
        fft_inplace(x);
        for (std::size_t k = 0; k < n; ++k)
        {
            // signed frequency index, Nyquist bin (even n) taken as negative
            double kk = (2 * k < n) ? double(k) : double(k) - double(n);
            x[k] *= std::polar(1.0, -2.0 * std::numbers::pi * kk * delay / double(n));
        }
        ifft_inplace(x);
    }
}
