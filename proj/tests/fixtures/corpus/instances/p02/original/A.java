public class A {
  private void compIndex(boolean flag) {
    Integer iii = flag ? 1 : 2;
    iii.byteValue();
  }
}
