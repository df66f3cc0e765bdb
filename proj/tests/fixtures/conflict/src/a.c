static int helper(int x) {
    return x + 1;
}

int use_a(int x) {
    return helper(x);
}
