#pragma once

// Independent reference values for tests. Nothing here calls into the
// library's formulas; constants are the documented defaults written out.

#include <cmath>
#include <cstdint>

namespace oracle {

inline constexpr double kElec = 50.0;  // nJ/bit
inline constexpr double kAmp = 0.1;    // nJ/bit/m^2 (100 pJ)

inline double tx(double bits, double d) { return kElec * bits + kAmp * bits * d * d; }
inline double rx(double bits) { return kElec * bits; }

inline double dist(double ax, double ay, double bx, double by) { return std::hypot(ax - bx, ay - by); }

// Brute-force thresholds. Epoch length is 1/p rounded to nearest; the last
// residue of an epoch yields 1.
inline double leach(bool in_g, long round, double p) {
    if (!in_g) return 0.0;
    const long len = static_cast<long>(std::floor(1.0 / p + 0.5));
    const long r = round % len;
    if (r == len - 1) return 1.0;
    double t = p / (1.0 - p * static_cast<double>(r));
    if (t > 1.0) t = 1.0;
    if (t < 0.0) t = 0.0;
    return t;
}

inline double floor_clamp(double v, double t_min) {
    double t = v < t_min ? t_min : v;
    if (t > 1.0) t = 1.0;
    return t;
}

inline double tcca(bool in_g, long round, double p, double re, double max_e, double t_min) {
    if (!in_g) return 0.0;
    return floor_clamp(leach(true, round, p) * re / max_e, t_min);
}

inline double mod_two(bool in_g, long round, double p, double re, double max_e, double t_min) {
    if (!in_g) return 0.0;
    return floor_clamp(leach(true, round, p) * re / (2.0 * max_e), t_min);
}

inline double mod_one(bool in_g, long round, double p, double re, double max_e, double t_min) {
    return tcca(in_g, round, p, re, max_e, t_min);
}

// Message sizes with default widths, summed field by field.
namespace bits {
inline constexpr double control = 50, data = 2000, key_id = 16, nonce = 32, counter = 16, mac = 32, flag = 1,
                        ttl = 4, timestamp = 16, slot = 24;

inline constexpr double leach_adv = control;
inline constexpr double leach_join = control;
inline double leach_schedule(int k) { return control + slot * k; }
inline constexpr double leach_report = control + data;
inline constexpr double bs_packet = control + data;

inline constexpr double sec_join = control + key_id + nonce + mac;

inline constexpr double tcca_adv = control + ttl + timestamp;
inline constexpr double tcca_join = control + timestamp + ttl;

inline constexpr double mod_full_report = control + data + flag /*RT*/ + ttl + flag /*PR*/;
inline double mod_confirm(int k) { return control + slot * k + ttl + flag * 3 /*RT PR AT*/; }
inline constexpr double mod_member_ack = control + flag;
inline constexpr double mod_ch_ack = control + flag;
inline constexpr double mod_half_report = control + data + flag /*PR*/ + ttl;
}  // namespace bits

}  // namespace oracle
