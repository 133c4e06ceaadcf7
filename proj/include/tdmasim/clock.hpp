#pragma once

#include <cassert>
#include <cstdint>

namespace tdma {

using Tick = std::uint64_t;     // simulated clock steps of 1 ms
using NodeId = std::uint32_t;

// Slot geometry: a timeslot is xi ticks, a frame is tau timeslots.
struct SlotParams {
    Tick xi{1};
    Tick tau{1};

    Tick frame_ticks() const { return xi * tau; }
};

// A node clock value in [0, modulus-1]. All timestamp arithmetic wraps at
// the modulus, which is identical for every node in one simulation.
struct ModularClock {
    Tick value{0};
    Tick modulus{1};
};

inline Tick mod_sub(Tick a, Tick b, Tick m) {
    assert(m > 0);
    a %= m;
    b %= m;
    return a >= b ? a - b : a + (m - b);
}

// Centered representative of (a - b) mod m, in (-m/2, m/2].
inline std::int64_t signed_offset(Tick a, Tick b, Tick m) {
    const Tick d = mod_sub(a, b, m);
    if (d > m - d) return -static_cast<std::int64_t>(m - d);
    return static_cast<std::int64_t>(d);
}

inline ModularClock advance(ModularClock clk, Tick x) {
    clk.value = (clk.value + x % clk.modulus) % clk.modulus;
    return clk;
}

inline Tick slot_of(Tick t, const SlotParams& p) {
    return (t / p.xi) % p.tau;
}

inline Tick frame_of(Tick t, const SlotParams& p) {
    return (t / (p.xi * p.tau)) % p.tau;
}

// True iff the timestamp ts is at most timeout ticks old at time now,
// wrapping at the modulus. Requires timeout < m/2 so the window is
// unambiguous.
inline bool age_within(Tick ts, Tick now, Tick timeout, Tick m) {
    return mod_sub(now, ts, m) <= timeout;
}

// Windowed order on wrapped timestamps: t_remote is strictly ahead of
// t_local iff 0 < (t_remote - t_local) mod m < m/2. A timestamp that has
// wrapped past zero still compares as newer, which is what the
// converge-to-the-max rule needs near the wrap point.
inline bool strictly_newer(Tick t_local, Tick t_remote, Tick m) {
    const Tick d = mod_sub(t_remote, t_local, m);
    return d > 0 && d < m - d;
}

} // namespace tdma
