import java.util.ArrayList;
import java.util.List;

public class Box<T> {
  protected final List<T> items = new ArrayList<>();

  public void add(T item) {
    items.add(item);
  }

  public int size() {
    return items.size() * 10;
  }
}
