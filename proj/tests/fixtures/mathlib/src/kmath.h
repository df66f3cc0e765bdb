#ifndef KMATH_H
#define KMATH_H

typedef unsigned int u32;
typedef int s32;
typedef unsigned long long u64;
typedef long long s64;

#define BITS_PER_LONG 64

struct reciprocal_value {
    u32 m;
    unsigned char sh1;
    unsigned char sh2;
};

struct u32_fract {
    u32 numerator;
    u32 denominator;
};

#endif
