static int helper(int x) {
    return x * 2;
}

int use_b(int x) {
    return helper(x);
}
