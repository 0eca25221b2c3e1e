int sumUntil(int[] xs, int limit) {
    int total = 0;
    int k = 0;
    // stop once the limit is reached
    while (k < xs.length && total < limit) {
        total += xs[k];
        k++;
    }
    return total;
}
