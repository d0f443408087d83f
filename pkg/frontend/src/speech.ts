// Optional browser speech capture. Transcripts feed the same submit path
// as typed text; nothing here is required for the engine to work.

type RecognitionCtor = new () => {
  lang: string;
  interimResults: boolean;
  onresult: ((event: { results: ArrayLike<ArrayLike<{ transcript: string }>> }) => void) | null;
  onend: (() => void) | null;
  start: () => void;
  stop: () => void;
};

export function speechRecognitionAvailable(): boolean {
  const w = window as unknown as Record<string, unknown>;
  return Boolean(w.SpeechRecognition || w.webkitSpeechRecognition);
}

export function captureUtterance(onTranscript: (text: string) => void): (() => void) | null {
  const w = window as unknown as Record<string, unknown>;
  const Ctor = (w.SpeechRecognition || w.webkitSpeechRecognition) as RecognitionCtor | undefined;
  if (!Ctor) {
    return null;
  }
  const recognition = new Ctor();
  recognition.lang = "en-US";
  recognition.interimResults = false;
  recognition.onresult = (event) => {
    const result = event.results[0]?.[0];
    if (result) {
      onTranscript(result.transcript);
    }
  };
  recognition.start();
  return () => recognition.stop();
}
