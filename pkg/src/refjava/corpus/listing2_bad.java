class RangesBad {
    @Refinement("_ >= a && _ <= b")
    public static int inRange(int a, @Refinement("b > a") int b) {
        return a + 1;
    }

    static void use() {
        inRange(10, 20);
        inRange(10, 2);
    }
}
