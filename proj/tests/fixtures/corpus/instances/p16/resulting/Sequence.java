public class Sequence {
  private int calls = 0;
  private final int[] history = new int[8];

  private int tick() {
    history[calls % history.length] = calls;
    return ++calls;
  }

  public int sum(int n) {
    int total = 0;
    int t = tick();
    for (int i = 0; i < n; i++) {
      total += t;
    }
    return total;
  }
}
