class Colors {
    void demo() {
        @Refinement("r >= 0 && r <= 255")
        int r;
        r = 90;
        r = 200 + 60;
    }
}
