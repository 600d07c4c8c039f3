@ExternalRefinementsFor("java.net.Socket")
@StateSet({"unconnected", "bound", "connected", "closed"})
interface SocketBadRefinements {
    @StateRefinement(to="unconnected(this)")
    void Socket();

    @StateRefinement(from="unconnected(this)", to="bound(this)")
    void bind(SocketAddress add);

    @StateRefinement(from="bound(this)", to="connected(this)")
    void connect(SocketAddress add, int timeout);

    @StateRefinement(from="connected(this)")
    void sendUrgentData(int n);

    @StateRefinement(to="closed(this)")
    void close();
}

class MainBad {
    void run() {
        SocketAddress address = new SocketAddress();
        Socket s = new Socket();
        s.connect(address, 1000);
    }
}
