public class Shop {
  private int count;

  public void run(int i, String name) {
    while (i < MAX_VALUE) {
      op.createPanel(i);
      i = i + 2;
    }
    if (name == null) {
      return;
    }
    log(name);
  }
}
