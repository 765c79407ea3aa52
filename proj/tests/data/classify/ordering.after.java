public class Shop {
  private int count;

  public void run(int i, String name) {
    while (i < MAX_VALUE) {
      i = i + 1;
      op.createPanel(i);
    }
    if (name == null) {
      return;
    }
    log(name);
  }
}
