void tally(List<Item> items) {
    count = 0;
    for (Item it : items) {
        int count = it.size();
        if (count > 0) {
            int extra = count * 2;
            total += extra;
        }
    }
    {
        int extra = 1;
        total += extra;
    }
    log(count, total);
}
