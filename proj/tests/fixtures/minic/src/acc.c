#include "minic.h"

int counter = 0;

void acc_add(struct acc *a, int v) {
    a->sum += clamp(v);
    a->count += 1;
    counter += 1;
}

int acc_mean(const struct acc *a) {
    if (a->count == 0)
        return 0;
    return a->sum / a->count;
}

int sum_range(int lo, int hi) {
    int s = 0;
    for (int i = lo; i < hi; i++)
        s += mix(i);
    return s;
}

int parity_sum(unsigned n) {
    int k = 0;
    for (unsigned i = 0; i < n; i++)
        if (is_even(i))
            k++;
    return k;
}

int run_all(void) {
    struct acc a = {0, 0};
    acc_add(&a, sum_range(0, 10));
    acc_add(&a, parity_sum(7));
    return acc_mean(&a);
}
