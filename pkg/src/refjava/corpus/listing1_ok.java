class ColorsOk {
    void demo() {
        @Refinement("r >= 0 && r <= 255")
        int r;
        r = 90;
    }
}
