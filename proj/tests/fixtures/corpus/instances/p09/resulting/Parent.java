public class Parent {
  static final String TAG;

  static {
    TAG = "parent";
  }

  int value = 2;

  int read() {
    return value;
  }
}
