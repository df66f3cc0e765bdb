#ifndef MINIC_H
#define MINIC_H

#define LIMIT 100

struct acc {
    int sum;
    int count;
};

extern int counter;

int clamp(int v);
int twice(int v);
int half(int v);
int mix(int v);
int is_even(unsigned n);
int is_odd(unsigned n);
void acc_add(struct acc *a, int v);
int acc_mean(const struct acc *a);
int sum_range(int lo, int hi);
int parity_sum(unsigned n);
int run_all(void);

#endif
