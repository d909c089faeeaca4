import java.util.function.IntSupplier;

public class Counter {
  private int count = 0;

  public int twice() {
    int v = ++count;
    IntSupplier s = () -> v;
    return s.getAsInt() + s.getAsInt();
  }
}
