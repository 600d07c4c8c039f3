// A deque protocol in the style of the external Socket refinements:
// removing from a possibly-empty deque is flagged.  The two states
// over-approximate emptiness, so removeFirst keeps the deque nonempty
// from the checker's point of view; this file exists to exercise a
// wrong call order, not to model java.util.ArrayDeque faithfully.
@ExternalRefinementsFor("java.util.ArrayDeque")
@StateSet({"empty", "nonempty"})
interface ArrayDequeRefinements {
    @StateRefinement(to="empty(this)")
    void ArrayDeque();

    @StateRefinement(to="nonempty(this)")
    void addFirst(int e);

    @StateRefinement(to="nonempty(this)")
    void addLast(int e);

    @StateRefinement(from="nonempty(this)")
    int removeFirst();

    @StateRefinement(from="nonempty(this)")
    int peekFirst();
}

class Worklist {
    void drainFirstTwo() {
        ArrayDeque d = new ArrayDeque();
        d.removeFirst();
        d.addFirst(7);
        d.removeFirst();
    }
}
