import java.util.Arrays;
import java.util.List;

public class Stats {
  public static String label() {
    List<Character> xs = Arrays.asList('a', 'z', 'm');
    Character best = xs.get(0);
    for (Character x : xs) {
      if (x.compareTo(best) < 0) {
        best = x;
      }
    }
    return "\u00e9" + best;
  }
}
