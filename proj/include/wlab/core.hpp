#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace wlab {

// Points live on the stack; coefficient vectors and design matrices do not.
inline constexpr int kMaxDim = 8;
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline const char* kVersion = "0.3.1";

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input: CLI exit code 1.
class InputError : public Error {
public:
    using Error::Error;
};

// A documented precondition does not hold: CLI exit code 2.
class PreconditionError : public Error {
public:
    using Error::Error;
};

class DimensionError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

// Iterative solver or search did not converge: CLI exit code 3.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

inline void require_dim(int expected, int got, const char* what) {
    if (expected != got)
        throw DimensionError(std::string(what) + ": dimension mismatch (expected " +
                             std::to_string(expected) + ", got " + std::to_string(got) + ")");
}

inline Point make_point(std::initializer_list<double> xs) {
    Point p(static_cast<int>(xs.size()));
    int i = 0;
    for (double v : xs) p[i++] = v;
    return p;
}

// Deterministic across platforms: uniforms are built from raw 64-bit words,
// never through std::uniform_real_distribution.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : state_(seed ^ 0x9e3779b97f4a7c15ULL) { next(); }

    std::uint64_t next() {
        // splitmix64
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        double rad = std::sqrt(-2.0 * std::log(u1));
        spare_ = rad * std::sin(2.0 * M_PI * u2);
        has_spare_ = true;
        return rad * std::cos(2.0 * M_PI * u2);
    }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }
    Point unit_vector(int d) {
        Point v(d);
        double n2 = 0;
        do {
            for (int i = 0; i < d; ++i) v[i] = normal();
            n2 = v.squaredNorm();
        } while (n2 < 1e-20);
        return v / std::sqrt(n2);
    }
    // Child stream for index i; used for seeded partitioning of parallel work.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t i) {
        Rng g(seed * 0x100000001b3ULL + i);
        return g.next();
    }

private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0;
};

}  // namespace wlab
