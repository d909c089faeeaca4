public class Account {
  private int balance = 100;

  int report() {
    return balance;
  }

  class Audit {
    private int balance = 5;

    int check() {
      return report();
    }
  }

  public int audit() {
    return new Audit().check();
  }
}
