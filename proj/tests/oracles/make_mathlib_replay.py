"""Writes tests/fixtures/mathlib/replay.json.

Every translation and repair completion is scripted per function. The
broken completions carry the error kinds seen in practice (unresolved
names, type mismatches, ambiguous numeric types, values used as types),
arranged so that 7 functions compile straight after probing, 5 more after
one repair round, 2 after the second, 1 after the third and 3 never.
"""

import json
import pathlib

OK = {
    "gcd": """pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}""",
    "lcm": """pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    (a / gcd(a, b)) * b
}""",
    "abs_s64": """pub fn abs_s64(v: s64) -> s64 {
    if v < 0 { -v } else { v }
}""",
    "min_u32": """pub fn min_u32(a: u32, b: u32) -> u32 {
    if a < b { a } else { b }
}""",
    "max_u32": """pub fn max_u32(a: u32, b: u32) -> u32 {
    if a > b { a } else { b }
}""",
    "clamp_u32": """pub fn clamp_u32(v: u32, lo: u32, hi: u32) -> u32 {
    min_u32(max_u32(v, lo), hi)
}""",
    "is_power_of_2": """pub fn is_power_of_2(n: u64) -> i32 {
    (n != 0 && (n & (n - 1)) == 0) as i32
}""",
    "int_sqrt": """pub fn int_sqrt(mut x: u64) -> u64 {
    if x <= 1 {
        return x;
    }
    let mut y: u64 = 0;
    let mut m: u64 = 1 << 62;
    while m != 0 {
        let b = y + m;
        y >>= 1;
        if x >= b {
            x -= b;
            y += m;
        }
        m >>= 2;
    }
    y
}""",
    "int_pow": """pub fn int_pow(mut base: u64, mut exp: u32) -> u64 {
    let mut result: u64 = 1;
    while exp != 0 {
        if exp & 1 != 0 {
            result = result.wrapping_mul(base);
        }
        exp >>= 1;
        base = base.wrapping_mul(base);
    }
    result
}""",
    "fls64": """pub fn fls64(x: u64) -> i32 {
    64 - x.leading_zeros() as i32
}""",
    "roundup_pow_of_two": """pub fn roundup_pow_of_two(n: u64) -> u64 {
    1u64 << fls64(n - 1)
}""",
    "reciprocal_value": """pub fn reciprocal_value(d: u32) -> reciprocal_value {
    let l = fls64(d as u64 - 1);
    let mut m: u64 = (1u64 << 32) * ((1u64 << l) - d as u64);
    m /= d as u64;
    m += 1;
    reciprocal_value {
        m: m as u32,
        sh1: if l > 1 { 1 } else { l as u8 },
        sh2: if l - 1 > 0 { (l - 1) as u8 } else { 0 },
    }
}""",
    "div64_u64_rem": """pub unsafe fn div64_u64_rem(dividend: u64, divisor: u64, remainder: *mut u64) -> u64 {
    *remainder = dividend % divisor;
    dividend / divisor
}""",
    "mult_frac": """pub fn mult_frac(x: u64, n: u64, d: u64) -> u64 {
    let q = x / d;
    let r = x % d;
    q * n + r * n / d
}""",
    "ilog2_u64": """pub fn ilog2_u64(n: u64) -> i32 {
    fls64(n) - 1
}""",
    "int_cbrt": """pub fn int_cbrt(mut x: u64) -> u64 {
    let mut y: u64 = 0;
    let mut s: i32 = 63;
    while s >= 0 {
        y = 2 * y;
        let b = 3 * y * (y + 1) + 1;
        if (x >> s) >= b {
            x -= b << s;
            y += 1;
        }
        s -= 3;
    }
    y
}""",
}

# No repair of these compiles. For reciprocal_value the Rust struct and
# function share a name, which C keeps in separate namespaces.
NEVER = {"reciprocal_value", "u32_fract_reduce", "div_s64_rem"}

BROKEN = {
    # round-1 fixes
    "int_sqrt": [
        """pub fn int_sqrt(mut x: u64) -> u64 {
    if x <= 1 {
        return x;
    }
    let mut y: u32 = 0;
    let mut m: u64 = 1 << 62;
    while m != 0 {
        let b = y + m;
        y >>= 1;
        if x >= b {
            x -= b;
            y += m;
        }
        m >>= 2;
    }
    y
}"""
    ],
    "int_pow": [
        """pub fn int_pow(mut base: u64, mut exp: u32) -> u64 {
    while exp != 0 {
        if exp & 1 != 0 {
            res = res.wrapping_mul(base);
        }
        exp >>= 1;
        base = base.wrapping_mul(base);
    }
    res
}"""
    ],
    "fls64": [
        """pub fn fls64(x: u64) -> i32 {
    2.pow(6) - x.leading_zeros() as i32
}"""
    ],
    "roundup_pow_of_two": [
        """pub fn roundup_pow_of_two(n: u64) -> u64 {
    let shift: u32 = fls64(n - 1);
    1u64 << shift
}"""
    ],
    "int_cbrt": [
        """pub fn int_cbrt(mut x: u64) -> u64 {
    let mut y: u64 = 0;
    let mut s: i32 = 63;
    while s >= 0 {
        y = 2 * y;
        let b = 3 * y * (y + 1) + 1;
        if (x >> s) >= b {
            x -= b << s;
            y += 1;
        }
        s -= step;
    }
    y
}"""
    ],
    # round-2 fixes
    "div64_u64_rem": [
        """pub fn div64_u64_rem(dividend: u64, divisor: u64, remainder: &mut u64) -> u64 {
    *remainder = dividend % divisor;
    dividend / divisor as u32
}""",
        """pub unsafe fn div64_u64_rem(dividend: u64, divisor: u64, remainder: *mut u64) -> u64 {
    *remainder = dividend % divisor;
    quotient
}""",
    ],
    "mult_frac": [
        """pub fn mult_frac(x: u64, n: u64, d: u64) -> u64 {
    let (q, r) = (x / d, x % d);
    q * n + r * n / d as u32
}""",
        """pub fn mult_frac(x: u64, n: u64, d: u64) -> u64 {
    let q = x / d;
    q * n + rem * n / d
}""",
    ],
    # round-3 fix
    "ilog2_u64": [
        """pub fn ilog2_u64(n: u64) -> i32 {
    fls64(n) - 1u32
}""",
        """pub fn ilog2_u64(n: u64) -> u32 {
    fls64(n) - 1
}""",
        """pub fn ilog2_u64(n: u64) -> i32 {
    log_2(n) - 1
}""",
    ],
    # never compile
    "reciprocal_value": [
        """pub fn reciprocal_value(d: u32) -> reciprocal_value {
    let l = fls64(d as u64 - 1);
    let mut m: u64 = (1u64 << 32) * ((1u64 << l) - d);
    m /= d as u64;
    m += 1;
    reciprocal_value {
        m: m as u32,
        sh1: if l > 1 { 1 } else { l as u8 },
        sh2: if l - 1 > 0 { (l - 1) as u8 } else { 0 },
    }
}""",
        """pub fn reciprocal_value(d: u32) -> reciprocal_value {
    let l = fls64(d as u64 - 1);
    let m: u64 = ((1u64 << 32) * ((1u64 << l) - d as u64)) / d as u64 + 1;
    reciprocal_value { m: m as u32, sh1: l.min(1) as u8, sh2: (l - 1).max(0) as u8 }
}""",
        """pub fn reciprocal_value(d: u32) -> self::reciprocal_value {
    let l = fls64(d as u64 - 1);
    let m: u64 = ((1u64 << 32) * ((1u64 << l) - d as u64)) / d as u64 + 1;
    self::reciprocal_value { m: m as u32, sh1: l.min(1) as u8, sh2: (l - 1).max(0) as u8 }
}""",
    ]
    + [OK["reciprocal_value"]],
    "u32_fract_reduce": [
        """pub unsafe fn u32_fract_reduce(f: *mut u32_fract) {
    let g: gcd = gcd((*f).numerator as u64, (*f).denominator as u64);
    if g > 1 {
        (*f).numerator /= g;
        (*f).denominator /= g;
    }
}"""
    ]
    * 4,
    "div_s64_rem": [
        """pub unsafe fn div_s64_rem(dividend: s64, divisor: s32, remainder: *mut s32) -> s64 {
    *remainder = (dividend % divisor as s64) as BITS_PER_LONG;
    dividend / divisor as s64
}"""
    ]
    * 4,
}


def fence(text):
    return "```rust\n" + text + "\n```"


def main():
    scripted = {}
    names = list(OK) + ["u32_fract_reduce", "div_s64_rem"]
    for name in names:
        broken = BROKEN.get(name, [])
        first = broken[0] if broken else OK[name]
        scripted[f"translate/kmath.c::{name}"] = [fence(first)]
        if broken:
            repairs = broken[1:] + ([OK[name]] if name in OK and name not in NEVER else [])
            scripted[f"repair/kmath.c::{name}"] = [fence(r) for r in repairs[:3]]
    out = pathlib.Path(__file__).resolve().parents[1] / "fixtures" / "mathlib" / "replay.json"
    out.write_text(json.dumps({"scripted": scripted}, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
