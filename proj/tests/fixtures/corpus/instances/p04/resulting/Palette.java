public class Palette {
  public int total() {
    int sum = 0;
    for (Color c : Color.values()) {
      sum += c.code();
    }
    return sum;
  }
}
