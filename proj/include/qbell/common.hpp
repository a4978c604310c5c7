#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace qbell {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTol = 1e-10;       // default absolute comparison tolerance
inline constexpr double kDetectSlack = 1e-10;  // strict-inequality slack for detection verdicts

// Local dimensions of a bipartite system, ordered dA <= dB.
struct BipartiteDims {
    int dA = 1;
    int dB = 1;

    BipartiteDims() = default;
    BipartiteDims(int a, int b) : dA(a), dB(b) {
        if (a < 1 || b < 1) throw std::invalid_argument("dimensions must be positive");
        if (a > b) throw std::invalid_argument("dimensions must satisfy dA <= dB");
    }
    int total() const { return dA * dB; }
    bool equal() const { return dA == dB; }
    friend bool operator==(const BipartiteDims& l, const BipartiteDims& r) {
        return l.dA == r.dA && l.dB == r.dB;
    }
};

inline cplx root_of_unity(int d, long long k) {
    const double t = 2.0 * kPi * static_cast<double>(((k % d) + d) % d) / d;
    return {std::cos(t), std::sin(t)};
}

inline int mod(long long v, int d) { return static_cast<int>(((v % d) + d) % d); }

// Deterministic seed mixing for per-task RNG streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t task) {
    std::uint64_t s = master ^ (0x6a09e667f3bcc909ULL + task * 0x9e3779b97f4a7c15ULL);
    splitmix64(s);
    return splitmix64(s);
}

// All floating-point text output uses 12 significant digits.
inline std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

// Write-to-temporary plus rename, so readers never observe a half-written file.
inline void write_text_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open file for writing: " + tmp);
        out << content;
        if (!out.good()) throw std::runtime_error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("atomic rename failed: " + path);
}

}  // namespace qbell
