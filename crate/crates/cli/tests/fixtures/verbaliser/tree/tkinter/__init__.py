"""Bundled minimal GUI toolkit shim used for the end-user display mode."""


class Tk:
    def show(self, text):
        self.text = text

    def mainloop(self):
        pass
