// random.hpp
//
// Seeded randomness for tests and sampling: Haar-random unitaries (QR of a
// complex Gaussian matrix with phase fix) and random pure states.

#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include "linalg.hpp"
#include "state.hpp"

namespace mbqc {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return unif_(eng_); }

    // Uniform integer in [0, n).
    int uniform_int(int n) {
        if (n <= 0) throw std::invalid_argument("uniform_int: empty range");
        return static_cast<int>(std::uniform_int_distribution<int>(0, n - 1)(eng_));
    }

    cplx gaussian_complex() {
        return cplx(gauss_(eng_), gauss_(eng_)) / std::sqrt(2.0);
    }

    // Haar-distributed d x d unitary: QR of a Ginibre matrix, with R's
    // diagonal phases absorbed into Q so the distribution is exactly Haar.
    ComplexMatrix haar_unitary(std::size_t d) {
        std::vector<std::vector<cplx>> cols(d, std::vector<cplx>(d));
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t i = 0; i < d; ++i) cols[j][i] = gaussian_complex();
        // Gram-Schmidt with phase fix per column.
        for (std::size_t j = 0; j < d; ++j) {
            for (std::size_t k = 0; k < j; ++k) {
                cplx dot = 0.0;
                for (std::size_t i = 0; i < d; ++i) dot += std::conj(cols[k][i]) * cols[j][i];
                for (std::size_t i = 0; i < d; ++i) cols[j][i] -= dot * cols[k][i];
            }
            double nrm = 0.0;
            for (std::size_t i = 0; i < d; ++i) nrm += std::norm(cols[j][i]);
            nrm = std::sqrt(nrm);
            // R_jj = nrm * phase; divide by (nrm * phase) to fix the phase.
            cplx lead = 0.0;
            for (std::size_t i = 0; i < d; ++i)
                if (std::abs(cols[j][i]) > 1e-300) { lead = cols[j][i]; break; }
            const cplx phase = lead / std::abs(lead);
            for (std::size_t i = 0; i < d; ++i) cols[j][i] /= (nrm * phase);
        }
        ComplexMatrix u(d, d);
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t i = 0; i < d; ++i) u(i, j) = cols[j][i];
        return u;
    }

    QubitState random_state(int n_qubits) {
        QubitState s(n_qubits);
        for (auto& a : s.amps) a = gaussian_complex();
        return s.normalized();
    }

    // Sample an index from unnormalized non-negative weights.
    std::size_t sample_discrete(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double x = uniform() * total;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            x -= weights[i];
            if (x <= 0.0) return i;
        }
        return weights.size() - 1;
    }

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
    std::uniform_real_distribution<double> unif_{0.0, 1.0};
    std::normal_distribution<double> gauss_{0.0, 1.0};
};

}  // namespace mbqc
