@ExternalRefinementsFor("java.net.Socket")
@StateSet({"unconnected", "bound", "connected", "closed"})
interface SocketCloseRefinements {
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

class MainDoubleClose {
    void run() {
        Socket s = new Socket();
        s.close();
        s.close();
    }
}
