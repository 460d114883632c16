// Copyright 2026 The PHN Forecast Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serial vs OpenMP timings for the data-parallel kernels.
//
//   bench_kernels [repeats]
//
// Each row reports the best of `repeats` runs. Results of the two paths are
// compared bit for bit; a mismatch is reported and makes the exit status 1.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>

#include "phn/analysis.hpp"
#include "phn/exec.hpp"
#include "phn/hybrid.hpp"
#include "phn/simulator.hpp"

using namespace phn;

namespace {

double best_of(int repeats, const std::function<void()> &fn) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

void row(const char *name, double serial, double parallel, bool same) {
    std::printf("%-34s %10.4f %10.4f %8.2fx  %s\n", name, serial, parallel, serial / parallel,
                same ? "identical" : "MISMATCH");
}

void set_threads(int n) {
#ifdef _OPENMP
    omp_set_num_threads(n);
#else
    (void)n;
#endif
}

sim::BoundCircuit layered_circuit(int n_qubits, int layers) {
    sim::BoundCircuit c;
    c.n_qubits = n_qubits;
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> angle(0.0, 6.28);
    for (int l = 0; l < layers; ++l) {
        for (int q = 0; q < n_qubits; ++q) {
            c.gates.push_back({sim::Gate::h(q)});
            c.gates.push_back({sim::Gate::rz(q, angle(rng))});
            c.gates.push_back({sim::Gate::rzz(q, (q + 1) % n_qubits, angle(rng))});
            c.gates.push_back({sim::Gate::cnot(q, (q + 1) % n_qubits)});
        }
    }
    return c;
}

} // namespace

int main(int argc, char **argv) {
    const int repeats = argc > 1 ? std::max(1, std::atoi(argv[1])) : 3;
    const int threads = max_threads();
    std::printf("threads available: %d, repeats: %d\n\n", threads, repeats);
    std::printf("%-34s %10s %10s %9s\n", "kernel", "serial s", "omp s", "speedup");
    bool ok = true;

    {
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> u(-3.14, 3.14);
        data::SupervisedSet s{Matrix(512, 5), Matrix(512, 2)};
        for (auto &v : s.x.data()) {
            v = u(rng);
        }
        for (auto &v : s.y.data()) {
            v = u(rng) / 3.0;
        }
        const auto model = hybrid::init_model(hybrid::Variant::hybrid, 1);
        hybrid::Gradient a;
        hybrid::Gradient b;
        const double ts = best_of(repeats, [&] { a = hybrid::batch_gradient(model, s.x, s.y, 0, 512, Exec::serial); });
        const double tp = best_of(repeats, [&] { b = hybrid::batch_gradient(model, s.x, s.y, 0, 512, Exec::parallel); });
        const bool same = a.loss == b.loss && a.net == b.net && a.pqc == b.pqc;
        ok = ok && same;
        row("hybrid batch gradient (512 rows)", ts, tp, same);
    }
    {
        const auto spec = circuits::build_toy_ansatz(3);
        const auto xs = analysis::sample_features(1000, 2, 2);
        const std::vector<double> theta(13, 0.7);
        Matrix a;
        Matrix b;
        const double ts = best_of(repeats, [&] { a = analysis::empirical_fisher(spec, theta, xs, Exec::serial); });
        const double tp = best_of(repeats, [&] { b = analysis::empirical_fisher(spec, theta, xs, Exec::parallel); });
        ok = ok && a == b;
        row("empirical Fisher (N=3, 1000 x)", ts, tp, a == b);
    }
    {
        const auto spec = circuits::build_toy_ansatz(2);
        analysis::FourierCloud a;
        analysis::FourierCloud b;
        const double ts = best_of(repeats, [&] { a = analysis::fourier_cloud(spec, 200, 3, 8, Exec::serial); });
        const double tp = best_of(repeats, [&] { b = analysis::fourier_cloud(spec, 200, 3, 8, Exec::parallel); });
        const bool same = a.max_abs == b.max_abs && a.thetas == b.thetas &&
                          a.summary.front().abs_quantiles == b.summary.front().abs_quantiles;
        ok = ok && same;
        row("Fourier cloud (N=2, 200 draws)", ts, tp, same);
    }
    {
        // Amplitude loops switch to OpenMP on their own for large states; the
        // serial reference is the same code pinned to one thread.
        const auto c = layered_circuit(18, 2);
        std::vector<sim::Complex> a;
        std::vector<sim::Complex> b;
        set_threads(1);
        const double ts = best_of(repeats, [&] {
            const auto st = sim::run(c);
            a.assign(st.amplitudes().begin(), st.amplitudes().end());
        });
        set_threads(threads);
        const double tp = best_of(repeats, [&] {
            const auto st = sim::run(c);
            b.assign(st.amplitudes().begin(), st.amplitudes().end());
        });
        ok = ok && a == b;
        row("statevector, 18 qubits, 144 gates", ts, tp, a == b);
    }
    return ok ? 0 : 1;
}
