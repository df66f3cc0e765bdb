#include "minic.h"

int clamp(int v) {
    if (v > LIMIT)
        return LIMIT;
    if (v < 0)
        return 0;
    return v;
}

int twice(int v) {
    return clamp(v * 2);
}

int half(int v) {
    return clamp(v / 2);
}

int mix(int v) {
    return twice(v) + half(v);
}

int is_even(unsigned n) {
    if (n == 0)
        return 1;
    return is_odd(n - 1);
}

int is_odd(unsigned n) {
    if (n == 0)
        return 0;
    return is_even(n - 1);
}
