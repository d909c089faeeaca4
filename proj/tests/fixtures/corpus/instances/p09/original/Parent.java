public class Parent {
  static final String TAG;

  static {
    TAG = "parent";
  }

  int value = 1;

  int read() {
    return value;
  }
}
