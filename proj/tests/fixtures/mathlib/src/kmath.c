#include "kmath.h"

u64 gcd(u64 a, u64 b) {
    while (b != 0) {
        u64 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

u64 lcm(u64 a, u64 b) {
    if (a == 0 || b == 0)
        return 0;
    return (a / gcd(a, b)) * b;
}

s64 abs_s64(s64 v) {
    return v < 0 ? -v : v;
}

u32 min_u32(u32 a, u32 b) {
    return a < b ? a : b;
}

u32 max_u32(u32 a, u32 b) {
    return a > b ? a : b;
}

u32 clamp_u32(u32 v, u32 lo, u32 hi) {
    return min_u32(max_u32(v, lo), hi);
}

int is_power_of_2(u64 n) {
    return n != 0 && (n & (n - 1)) == 0;
}

u64 int_sqrt(u64 x) {
    u64 b, m, y = 0;
    if (x <= 1)
        return x;
    m = 1ULL << 62;
    while (m != 0) {
        b = y + m;
        y >>= 1;
        if (x >= b) {
            x -= b;
            y += m;
        }
        m >>= 2;
    }
    return y;
}

u64 int_pow(u64 base, u32 exp) {
    u64 result = 1;
    while (exp) {
        if (exp & 1)
            result *= base;
        exp >>= 1;
        base *= base;
    }
    return result;
}

int fls64(u64 x) {
    int n = 0;
    while (x != 0) {
        x >>= 1;
        n++;
    }
    return n;
}

u64 roundup_pow_of_two(u64 n) {
    return 1ULL << fls64(n - 1);
}

struct reciprocal_value reciprocal_value(u32 d) {
    struct reciprocal_value R;
    u64 m;
    int l = fls64(d - 1);
    m = ((1ULL << 32) * ((1ULL << l) - d));
    m /= d;
    ++m;
    R.m = (u32)m;
    R.sh1 = l > 1 ? 1 : l;
    R.sh2 = l - 1 > 0 ? l - 1 : 0;
    return R;
}

u64 div64_u64_rem(u64 dividend, u64 divisor, u64 *remainder) {
    *remainder = dividend % divisor;
    return dividend / divisor;
}

u64 mult_frac(u64 x, u64 n, u64 d) {
    u64 q = x / d;
    u64 r = x % d;
    return q * n + r * n / d;
}

int ilog2_u64(u64 n) {
    return fls64(n) - 1;
}

void u32_fract_reduce(struct u32_fract *f) {
    u32 g = (u32)gcd(f->numerator, f->denominator);
    if (g > 1) {
        f->numerator /= g;
        f->denominator /= g;
    }
}

s64 div_s64_rem(s64 dividend, s32 divisor, s32 *remainder) {
    *remainder = (s32)(dividend % divisor);
    return dividend / divisor;
}

u64 int_cbrt(u64 x) {
    u64 y = 0;
    int s;
    for (s = 63; s >= 0; s -= 3) {
        y = 2 * y;
        u64 b = 3 * y * (y + 1) + 1;
        if ((x >> s) >= b) {
            x -= b << s;
            y++;
        }
    }
    return y;
}
