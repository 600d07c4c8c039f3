@ExternalRefinementsFor("java.net.Socket")
@StateSet({"unconnected", "bound", "connected", "closed"})
interface SocketOkRefinements {
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

class MainOk {
    void run() {
        SocketAddress address = new SocketAddress();
        Socket s = new Socket();
        s.bind(address);
        s.connect(address, 1000);
        s.sendUrgentData(1);
        s.close();
    }
}
